"""Generational loop shared by NSGA-II and NSGA-III over integer genotypes."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..problem import DeploymentProblem, EvaluatedSolution, evaluate
from .dominance import constrained_dominates, crowding_distance, fast_non_dominated_sort
from .nsga3 import nsga3_survival
from .refpoints import default_population_size, generate_reference_points

log = logging.getLogger(__name__)


class Algorithm(str, enum.Enum):
    NSGA2 = "NSGA2"
    NSGA3 = "NSGA3"


@dataclass(frozen=True)
class AlgoParams:
    """Search settings. ``None`` fields are resolved per algorithm/problem.

    population_size defaults to 100 for NSGA-II and to the smallest multiple of
    four covering the reference points for NSGA-III; the per-gene mutation rate
    defaults to 1/|slots|.
    """

    population_size: Optional[int] = None
    generations: int = 100
    crossover_prob: float = 0.9
    mutation_prob_per_gene: Optional[float] = None
    seed: int = 42
    nsga3_divisions: int = 12

    def __post_init__(self):
        if self.population_size is not None and (self.population_size < 4 or self.population_size % 2):
            raise ValueError("population_size must be even and >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if self.mutation_prob_per_gene is not None and not 0.0 <= self.mutation_prob_per_gene <= 1.0:
            raise ValueError("mutation_prob_per_gene must lie in [0, 1]")
        if self.nsga3_divisions < 1:
            raise ValueError("nsga3_divisions must be >= 1")

    def mutation_rate(self, problem: DeploymentProblem) -> float:
        if self.mutation_prob_per_gene is not None:
            return self.mutation_prob_per_gene
        return 1.0 / problem.n_slots


NSGA2_DEFAULT_POPULATION = 100


@dataclass
class Individual:
    solution: EvaluatedSolution
    rank: int = 0
    crowding: float = 0.0
    niche: int = -1
    niche_distance: float = 0.0

    @property
    def genotype(self):
        return self.solution.genotype


def reference_points_for(problem: DeploymentProblem, params: AlgoParams) -> np.ndarray:
    if problem.n_objectives == 1:
        return np.ones((1, 1))
    return generate_reference_points(problem.n_objectives, params.nsga3_divisions)


def resolve_population_size(problem: DeploymentProblem, params: AlgoParams, algorithm: Algorithm) -> int:
    if params.population_size is not None:
        return params.population_size
    if algorithm is Algorithm.NSGA3:
        return default_population_size(len(reference_points_for(problem, params)))
    return NSGA2_DEFAULT_POPULATION


# -- variation -----------------------------------------------------------------

def random_genotype(problem: DeploymentProblem, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(rng.integers(n)) for n in problem.sizes)


def annotate(population: list[Individual]) -> list[list[int]]:
    """Set rank and crowding on every member; returns the fronts."""
    fronts = fast_non_dominated_sort(population)
    for r, front in enumerate(fronts):
        dist = crowding_distance([population[i].solution.internal_values for i in front])
        for i, d in zip(front, dist):
            population[i].rank = r
            population[i].crowding = float(d)
    return fronts


def tournament(population: list[Individual], rng: np.random.Generator, use_crowding: bool) -> Individual:
    a = population[int(rng.integers(len(population)))]
    b = population[int(rng.integers(len(population)))]
    if constrained_dominates(a, b):
        return a
    if constrained_dominates(b, a):
        return b
    if use_crowding and a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a if rng.random() < 0.5 else b


def uniform_crossover(p1, p2, rng: np.random.Generator, prob: float):
    if rng.random() >= prob:
        return tuple(p1), tuple(p2)
    swap = rng.random(len(p1)) < 0.5
    c1 = tuple(b if s else a for a, b, s in zip(p1, p2, swap))
    c2 = tuple(a if s else b for a, b, s in zip(p1, p2, swap))
    return c1, c2


def reset_mutation(genes, sizes, rng: np.random.Generator, rate: float) -> tuple[int, ...]:
    hits = rng.random(len(genes)) < rate
    return tuple(int(rng.integers(n)) if h else g for g, n, h in zip(genes, sizes, hits))


def make_offspring(
    population: list[Individual],
    problem: DeploymentProblem,
    params: AlgoParams,
    rng: np.random.Generator,
    use_crowding: bool,
) -> list[Individual]:
    rate = params.mutation_rate(problem)
    children: list[Individual] = []
    while len(children) < len(population):
        p1 = tournament(population, rng, use_crowding).genotype
        p2 = tournament(population, rng, use_crowding).genotype
        for genes in uniform_crossover(p1, p2, rng, params.crossover_prob):
            genes = reset_mutation(genes, problem.sizes, rng, rate)
            children.append(Individual(evaluate(genes, problem)))
    return children[: len(population)]


# -- survival ------------------------------------------------------------------

def split_duplicates(population) -> tuple[list[int], list[int]]:
    """Indices of first occurrences of each genotype, and of the repeats."""
    seen: set = set()
    unique, repeats = [], []
    for i, p in enumerate(population):
        g = getattr(p, "solution", p).genotype
        (repeats if g in seen else unique).append(i)
        seen.add(g)
    return unique, repeats


def unique_fronts(population) -> tuple[list[list[int]], list[int]]:
    """Fronts over distinct genotypes (as indices into ``population``) plus the repeats.

    Repeats only fill slots left over once every distinct genotype is kept;
    otherwise copies of one good point crowd everything else out.
    """
    unique, repeats = split_duplicates(population)
    fronts = fast_non_dominated_sort([population[i] for i in unique])
    return [[unique[k] for k in front] for front in fronts], repeats


def nsga2_survival(population: list, fronts: list[list[int]], n: int) -> list[int]:
    """Fill front by front; the overflowing front is cut by descending crowding."""
    kept: list[int] = []
    for front in fronts:
        if len(kept) + len(front) <= n:
            kept += front
            if len(kept) == n:
                break
            continue
        dist = crowding_distance([getattr(population[i], "solution", population[i]).internal_values for i in front])
        order = sorted(range(len(front)), key=lambda k: (-dist[k], front[k]))
        kept += [front[k] for k in order[: n - len(kept)]]
        break
    return kept


def nsga2_generation(population: list[Individual], problem, params: AlgoParams, rng) -> list[Individual]:
    annotate(population)
    merged = population + make_offspring(population, problem, params, rng, use_crowding=True)
    fronts, repeats = unique_fronts(merged)
    kept = nsga2_survival(merged, fronts, len(population))
    kept += repeats[: len(population) - len(kept)]
    survivors = [merged[i] for i in kept]
    annotate(survivors)
    return survivors


def nsga3_generation(population: list[Individual], problem, params: AlgoParams, refpoints, rng) -> list[Individual]:
    merged = population + make_offspring(population, problem, params, rng, use_crowding=False)
    fronts, repeats = unique_fronts(merged)
    n_unique = sum(len(f) for f in fronts)
    kept = nsga3_survival(merged, fronts, min(len(population), n_unique), refpoints, rng)
    kept += repeats[: len(population) - len(kept)]
    survivors = [merged[i] for i in kept]
    for r, front in enumerate(fast_non_dominated_sort(survivors)):
        for i in front:
            survivors[i].rank = r
    return survivors


# -- driver --------------------------------------------------------------------

@dataclass
class EvolutionResult:
    solutions: list[EvaluatedSolution]
    population: list[Individual] = field(repr=False)
    evaluations: int
    generations: int
    population_size: int

    @property
    def feasible(self) -> bool:
        return bool(self.solutions) and all(s.feasible for s in self.solutions)


def final_front(population) -> list[EvaluatedSolution]:
    """Feasible front-0 members deduplicated by genotype, or the least-violating ones."""
    sols = [getattr(p, "solution", p) for p in population]
    front0 = [sols[i] for i in fast_non_dominated_sort(sols)[0]]
    seen = set()
    out = []
    for s in front0:
        if s.genotype not in seen:
            seen.add(s.genotype)
            out.append(s)
    return sorted(out, key=lambda s: s.genotype)


def run_evolution(
    problem: DeploymentProblem,
    params: AlgoParams = AlgoParams(),
    algorithm: Algorithm = Algorithm.NSGA2,
    rng: Optional[np.random.Generator] = None,
) -> EvolutionResult:
    algorithm = Algorithm(algorithm)
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    n = resolve_population_size(problem, params, algorithm)
    refs = reference_points_for(problem, params) if algorithm is Algorithm.NSGA3 else None

    population = [Individual(evaluate(random_genotype(problem, rng), problem)) for _ in range(n)]
    evaluations = n
    for gen in range(params.generations):
        if algorithm is Algorithm.NSGA3:
            population = nsga3_generation(population, problem, params, refs, rng)
        else:
            population = nsga2_generation(population, problem, params, rng)
        evaluations += n
        if log.isEnabledFor(logging.DEBUG):
            feasible = sum(p.solution.feasible for p in population)
            log.debug("generation %d: %d/%d feasible", gen + 1, feasible, n)

    return EvolutionResult(final_front(population), population, evaluations, params.generations, n)
