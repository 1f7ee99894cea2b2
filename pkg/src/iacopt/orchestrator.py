"""End-to-end pipeline: parse, build, pick an algorithm, evolve, rank, emit."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .catalogue import Catalogue
from .doml import emit_solutions, make_solution_record, parse_document
from .doml.concretize import DEFAULT_IMAGE, emit_concretization
from .doml.emit import DEFAULT_COST_UNIT
from .doml.model import OptimizationSpec, SolutionRecord
from .errors import IacOptError, InfeasibleError
from .moea import AlgoParams, Algorithm, run_evolution
from .oracle import EnumerationBudget, brute_force_pareto
from .problem import DeploymentProblem, EvaluatedSolution, build_problem

log = logging.getLogger(__name__)

DEFAULT_MAX_SOLUTIONS = 5


@dataclass
class RunReport:
    algorithm: str
    search_space_size: int
    generations: int
    evaluations: int
    feasible_count: int
    solution_count: int = 0
    population_size: int = 0
    duration_s: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def summary(self) -> str:
        lines = [
            f"algorithm:        {self.algorithm}",
            f"search space:     {self.search_space_size}",
            f"population:       {self.population_size}",
            f"generations:      {self.generations}",
            f"evaluations:      {self.evaluations}",
            f"feasible found:   {self.feasible_count}",
            f"solutions:        {self.solution_count}",
            f"duration:         {self.duration_s:.3f} s",
        ]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


@dataclass(frozen=True)
class RankedSolution:
    name: str
    solution: EvaluatedSolution
    active: bool


@dataclass
class OptimizeResult:
    text: str
    report: RunReport
    ranked: list[RankedSolution]
    records: list[SolutionRecord]
    problem: DeploymentProblem


def select_algorithm(spec: OptimizationSpec, override: Optional[str] = None) -> Algorithm:
    """Three objectives go to NSGA-III, fewer to NSGA-II, unless overridden."""
    n = len(spec.objectives)
    if n == 0:
        raise IacOptError("the optimization layer declares no objectives")
    if override not in (None, "auto"):
        return Algorithm(override.upper())
    return Algorithm.NSGA3 if n >= 3 else Algorithm.NSGA2


def rank_and_select(
    solutions: Sequence[EvaluatedSolution],
    spec: OptimizationSpec,
    k: int = DEFAULT_MAX_SOLUTIONS,
) -> list[RankedSolution]:
    """Order by the priority objective, break ties by the others then by genotype, keep ``k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not solutions:
        raise InfeasibleError("no solutions to rank")
    p = spec.priority
    others = [j for j in range(len(spec.objectives)) if j != p]

    def key(s: EvaluatedSolution):
        iv = s.internal_values
        return (iv[p], *(iv[j] for j in others), s.genotype)

    ordered = sorted(solutions, key=key)[:k]
    return [RankedSolution(f"sol{i + 1}", s, i == 0) for i, s in enumerate(ordered)]


def optimize(
    doml_text: str,
    catalogue: Catalogue,
    params: Optional[AlgoParams] = None,
    *,
    algorithm: Optional[str] = None,
    max_solutions: int = DEFAULT_MAX_SOLUTIONS,
    cost_unit: str = DEFAULT_COST_UNIT,
    brute_force: bool = False,
    budget: EnumerationBudget = EnumerationBudget(),
    default_image: str = DEFAULT_IMAGE,
) -> OptimizeResult:
    """Run the whole pipeline on DOML text.

    Returns the input text extended with solution blocks and one
    ``concrete_infrastructure`` block per solution. Raises
    :class:`InfeasibleError` (with the least-violating solution attached) when
    no configuration meets the aggregate requirements.
    """
    started = time.perf_counter()
    params = params or AlgoParams()
    doc = parse_document(doml_text)
    if doc.optimization is None:
        raise IacOptError("input has no optimization layer")
    spec = doc.optimization
    warnings = [str(w) for w in doc.warnings]
    problem = build_problem(spec, catalogue)

    if brute_force:
        found = brute_force_pareto(problem, budget)
        report = RunReport("BRUTE_FORCE", problem.space_size, 0, problem.space_size, 0)
    else:
        algo = select_algorithm(spec, algorithm)
        result = run_evolution(problem, params, algo, np.random.default_rng(params.seed))
        found = result.solutions
        report = RunReport(
            algo.value, problem.space_size, result.generations, result.evaluations, 0,
            population_size=result.population_size,
        )
    report.warnings = warnings
    report.feasible_count = sum(s.feasible for s in found)

    if not found or not all(s.feasible for s in found):
        report.duration_s = time.perf_counter() - started
        best = min(found, key=lambda s: (s.constraints.total_violation, s.genotype)) if found else None
        detail = ""
        if best is not None:
            detail = (
                f"; least-violating configuration {list(problem.decisions(best.genotype))} "
                f"with total violation {best.constraints.total_violation:.6g}"
            )
        raise InfeasibleError("no configuration satisfies the requirements" + detail, best=best, report=report)

    ranked = rank_and_select(found, spec, max_solutions)
    records = [
        make_solution_record(
            r.name,
            list(zip(spec.objective_names, r.solution.objective_values)),
            problem.decisions(r.solution.genotype),
            cost_unit,
        )
        for r in ranked
    ]
    text = emit_solutions(doml_text, records, document=doc)
    if doc.infrastructure is not None:
        concrete, cwarn = emit_concretization(records, doc.infrastructure, catalogue, default_image)
        warnings += cwarn
        text = text.rstrip("\n") + "\n\n" + concrete
    else:
        warnings.append("no infrastructure layer: concretization skipped")

    report.solution_count = len(records)
    report.duration_s = time.perf_counter() - started
    for w in warnings:
        log.warning(w)
    return OptimizeResult(text, report, ranked, records, problem)
