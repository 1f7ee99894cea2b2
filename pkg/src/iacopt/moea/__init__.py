"""NSGA-II / NSGA-III engines over integer genotypes."""
from .dominance import (
    constrained_dominates,
    crowding_distance,
    dominance_matrix,
    fast_non_dominated_sort,
    pareto_dominates,
)
from .engine import (
    AlgoParams,
    Algorithm,
    EvolutionResult,
    Individual,
    nsga2_generation,
    nsga2_survival,
    nsga3_generation,
    run_evolution,
)
from .nsga3 import nsga3_survival
from .refpoints import default_population_size, generate_reference_points
