"""Multi-objective optimizer for IaC deployment configurations described in DOML."""
from .catalogue import Catalogue, CatalogueElement, filter_candidates, load_catalogue, lookup_image
from .doml import parse_document, read_input_archive
from .moea import AlgoParams, Algorithm, run_evolution
from .oracle import brute_force_pareto, enumerate_all
from .orchestrator import RunReport, optimize, rank_and_select, select_algorithm
from .problem import DeploymentProblem, build_problem, evaluate, evaluate_constraints, evaluate_objectives

__version__ = "0.1.0"
