"""Deployment problem: slots, candidate lists, objective and constraint evaluation.

A configuration picks one catalogue element per slot. Its aggregate properties:

* cost         -- sum of element costs
* availability -- arithmetic mean of element availabilities (percent)
* performance  -- sum of element performance metrics
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .catalogue import ELEMENT_TYPES, Catalogue, CatalogueElement, element_matches, filter_candidates
from .doml.model import (
    BOUND_TARGETS,
    AggregateBound,
    CategoricalMatch,
    KeyValue,
    ObjectiveSpec,
    OptimizationSpec,
)
from .errors import NoCandidatesError, ProblemError

Genotype = tuple[int, ...]


@dataclass(frozen=True)
class DeploymentProblem:
    slots: tuple[str, ...]
    candidates: tuple[tuple[CatalogueElement, ...], ...]
    objectives: tuple[ObjectiveSpec, ...]
    bounds: tuple[AggregateBound, ...] = ()
    priority: int = 0

    def __post_init__(self):
        if not self.slots:
            raise ProblemError("a problem needs at least one slot")
        if len(self.candidates) != len(self.slots):
            raise ProblemError("one candidate list per slot is required")
        for slot, cands in zip(self.slots, self.candidates):
            if not cands:
                raise ProblemError(f"slot {slot} has no candidates")
            if any(c.element_type != slot for c in cands):
                raise ProblemError(f"slot {slot} holds candidates of another element type")
        if not 1 <= len(self.objectives) <= 3:
            raise ProblemError("between one and three objectives are supported")
        if not 0 <= self.priority < len(self.objectives):
            raise ProblemError("priority index out of range")
        for b in self.bounds:
            if b.target not in BOUND_TARGETS:
                raise ProblemError(f"requirement {b.id} bounds unknown property {b.target!r}")

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.candidates)

    @property
    def space_size(self) -> int:
        return math.prod(self.sizes)

    def elements(self, genotype: Sequence[int]) -> list[CatalogueElement]:
        if len(genotype) != self.n_slots:
            raise ProblemError(f"genotype has {len(genotype)} genes, problem has {self.n_slots} slots")
        out = []
        for i, g in enumerate(genotype):
            if not 0 <= g < len(self.candidates[i]):
                raise ProblemError(f"gene {i} = {g} outside [0, {len(self.candidates[i])})")
            out.append(self.candidates[i][g])
        return out

    def decisions(self, genotype: Sequence[int]) -> tuple[str, ...]:
        return tuple(e.id for e in self.elements(genotype))


@dataclass(frozen=True)
class ConstraintReport:
    violations: tuple[float, ...]
    total_violation: float
    feasible: bool


@dataclass(frozen=True)
class EvaluatedSolution:
    genotype: Genotype
    objective_values: tuple[float, ...]
    internal_values: tuple[float, ...]
    constraints: ConstraintReport

    @property
    def feasible(self) -> bool:
        return self.constraints.feasible


def parse_slots(value: str) -> tuple[str, ...]:
    lookup = {t.lower(): t for t in ELEMENT_TYPES}
    slots = []
    for token in value.split(","):
        token = token.strip()
        if not token:
            continue
        if token.lower() not in lookup:
            raise ProblemError(f"unknown element type {token!r} in elements requirement (known: VM, Storage)")
        slots.append(lookup[token.lower()])
    if not slots:
        raise ProblemError("elements requirement lists no element types")
    return tuple(slots)


def build_problem(spec: OptimizationSpec, catalogue: Catalogue) -> DeploymentProblem:
    """Turn a parsed spec plus the catalogue into a searchable problem."""
    elements = spec.key_values("elements")
    if not elements:
        raise ProblemError("the optimization layer has no 'elements' requirement")
    if len(elements) > 1:
        raise ProblemError("the optimization layer has more than one 'elements' requirement")
    slots = parse_slots(elements[0].value)

    element_reqs = [
        r for r in spec.requirements
        if isinstance(r, CategoricalMatch) or (isinstance(r, KeyValue) and r.key == "max_VM_memory")
    ]
    candidates = []
    for slot in slots:
        cands = filter_candidates(catalogue, slot, element_reqs)
        if not cands:
            pool = catalogue.of_type(slot)
            if not pool:
                reason = f"the catalogue has no {slot} elements"
            else:
                failing = [r.id for r in element_reqs if not any(element_matches(e, [r]) for e in pool)]
                reason = "no element satisfies all of " + ", ".join(r.id for r in element_reqs)
                if failing:
                    reason = "no element satisfies " + ", ".join(failing)
            raise NoCandidatesError(f"slot {slot} has zero candidates after matchmaking: {reason}")
        candidates.append(tuple(cands))

    return DeploymentProblem(
        slots=slots,
        candidates=tuple(candidates),
        objectives=spec.objectives,
        bounds=spec.bounds,
        priority=spec.priority,
    )


def aggregate(elements: Sequence[CatalogueElement]) -> dict[str, float]:
    return {
        "cost": math.fsum(e.cost for e in elements),
        "availability": math.fsum(e.availability for e in elements) / len(elements),
        "performance": math.fsum(e.performance for e in elements),
    }


def evaluate_objectives(genotype: Sequence[int], problem: DeploymentProblem) -> tuple[float, ...]:
    """Declared objectives, in declaration order and user orientation."""
    values = aggregate(problem.elements(genotype))
    return tuple(values[o.name] for o in problem.objectives)


def bound_violation(bound: AggregateBound, value: float) -> float:
    scale = max(abs(bound.threshold), 1.0)
    if bound.kind == "max":
        return max(0.0, value - bound.threshold) / scale
    return max(0.0, bound.threshold - value) / scale


def _report(bounds: Sequence[AggregateBound], values: dict[str, float]) -> ConstraintReport:
    violations = []
    for b in bounds:
        if b.target not in values:
            raise ProblemError(f"requirement {b.id} bounds unknown property {b.target!r}")
        violations.append(bound_violation(b, values[b.target]))
    total = math.fsum(violations)
    return ConstraintReport(tuple(violations), total, total == 0.0)


def evaluate_constraints(genotype: Sequence[int], problem: DeploymentProblem) -> ConstraintReport:
    return _report(problem.bounds, aggregate(problem.elements(genotype)))


def to_internal(values: Sequence[float], objectives: Sequence[ObjectiveSpec]) -> tuple[float, ...]:
    """Flip maximized objectives so every coordinate is minimized."""
    if len(values) != len(objectives):
        raise ValueError("value/objective length mismatch")
    return tuple(-v if o.maximize else v for v, o in zip(values, objectives))


def from_internal(values: Sequence[float], objectives: Sequence[ObjectiveSpec]) -> tuple[float, ...]:
    # negation is its own inverse
    return to_internal(values, objectives)


def evaluate(genotype: Sequence[int], problem: DeploymentProblem) -> EvaluatedSolution:
    genotype = tuple(int(g) for g in genotype)
    values = aggregate(problem.elements(genotype))
    objective_values = tuple(values[o.name] for o in problem.objectives)
    return EvaluatedSolution(
        genotype=genotype,
        objective_values=objective_values,
        internal_values=to_internal(objective_values, problem.objectives),
        constraints=_report(problem.bounds, values),
    )
