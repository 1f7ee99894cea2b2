"""Exhaustive enumeration: ground-truth Pareto sets for small problems.

Dominance is re-derived here from user-oriented objective values and
directions, without going through :mod:`iacopt.moea`, so a bug there cannot
validate itself.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ProblemError
from .problem import DeploymentProblem, EvaluatedSolution, evaluate


@dataclass(frozen=True)
class EnumerationBudget:
    max_combinations: int = 10**6

    def __post_init__(self):
        if self.max_combinations <= 0:
            raise ValueError("max_combinations must be positive")


def _check_budget(problem: DeploymentProblem, budget: EnumerationBudget) -> None:
    if problem.space_size > budget.max_combinations:
        raise ProblemError(
            f"search space has {problem.space_size} combinations, budget allows {budget.max_combinations}"
        )


def enumerate_all(problem: DeploymentProblem, budget: EnumerationBudget = EnumerationBudget()) -> list[EvaluatedSolution]:
    _check_budget(problem, budget)
    return [evaluate(g, problem) for g in itertools.product(*(range(n) for n in problem.sizes))]


def _better_or_equal(x: float, y: float, maximize: bool) -> bool:
    return x >= y if maximize else x <= y


def dominates_by_direction(a: EvaluatedSolution, b: EvaluatedSolution, problem: DeploymentProblem) -> bool:
    no_worse = all(
        _better_or_equal(x, y, o.maximize)
        for x, y, o in zip(a.objective_values, b.objective_values, problem.objectives)
    )
    return no_worse and a.objective_values != b.objective_values


def pareto_filter(solutions: list[EvaluatedSolution], problem: DeploymentProblem) -> list[EvaluatedSolution]:
    """Non-dominated subset.

    After a lexicographic sort on "smaller is better" keys every dominator
    precedes what it dominates, so each candidate only needs checking
    against the front kept so far.
    """
    def key(s):
        return tuple(-v if o.maximize else v for v, o in zip(s.objective_values, problem.objectives))

    front: list[EvaluatedSolution] = []
    for s in sorted(solutions, key=key):
        if not any(dominates_by_direction(t, s, problem) for t in front):
            front.append(s)
    return front


def brute_force_pareto(problem: DeploymentProblem, budget: EnumerationBudget = EnumerationBudget()) -> list[EvaluatedSolution]:
    """Feasible non-dominated configurations, or the least-violating ones if none is feasible.

    Sorted by genotype.
    """
    everything = enumerate_all(problem, budget)
    feasible = [s for s in everything if s.constraints.total_violation == 0]
    if feasible:
        front = pareto_filter(feasible, problem)
    else:
        least = min(s.constraints.total_violation for s in everything)
        front = [s for s in everything if s.constraints.total_violation == least]
    return sorted(front, key=lambda s: s.genotype)
