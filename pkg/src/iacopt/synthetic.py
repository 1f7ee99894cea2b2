"""Seeded random instances (DOML text + catalogue) for experiments and tests."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .catalogue import Catalogue, CatalogueElement, VMImageEntry
from .doml.emit import format_optimization
from .doml.model import AggregateBound, KeyValue, ObjectiveSpec, OptimizationSpec
from .problem import aggregate

DIRECTION = {"cost": "min", "availability": "max", "performance": "max"}
SLOT_PATTERNS = (
    ("VM", "Storage"),
    ("Storage", "VM"),
    ("VM", "Storage", "VM"),
    ("Storage", "VM", "Storage"),
    ("VM", "VM", "Storage"),
)


@dataclass(frozen=True)
class Instance:
    spec: OptimizationSpec
    catalogue: Catalogue
    doml: str

    @property
    def space_size(self) -> int:
        counts = {t: len(self.catalogue.of_type(t)) for t in ("VM", "Storage")}
        return math.prod(counts[s] for s in self.spec.key_values("elements")[0].value.split(", "))


def random_elements(rng: np.random.Generator, element_type: str, count: int, prefix: str) -> list[CatalogueElement]:
    out = []
    for i in range(count):
        perf = round(float(rng.uniform(1, 10)), 1)
        avail = round(float(rng.uniform(90, 99.99)), 2)
        cost = round(float(rng.uniform(10, 200)), 2)
        out.append(CatalogueElement(
            id=f"{prefix}{i}",
            element_type=element_type,
            provider="aws",
            region="europe",
            cost=cost,
            availability=avail,
            performance=perf,
            memory_gb=float(rng.choice([512, 1024, 2048])) if element_type == "VM" else None,
        ))
    return out


def random_instance(seed: int, min_space: int = 20, max_space: int = 500) -> Instance:
    """Instance with 2-3 slots, 2-3 objectives and randomized aggregate bounds.

    Bounds are placed at random quantiles of the enumerated configuration
    values, so most instances keep some feasible configurations.
    """
    rng = np.random.default_rng(seed)
    while True:
        slots = SLOT_PATTERNS[int(rng.integers(len(SLOT_PATTERNS)))]
        n_vm, n_st = int(rng.integers(2, 11)), int(rng.integers(2, 11))
        size = math.prod(n_vm if s == "VM" else n_st for s in slots)
        if min_space <= size <= max_space:
            break
    vms = random_elements(rng, "VM", n_vm, "vm")
    storages = random_elements(rng, "Storage", n_st, "st")

    n_obj = int(rng.integers(2, 4))
    names = ["cost", "availability", "performance"]
    picked = sorted(rng.choice(3, size=n_obj, replace=False).tolist())
    objectives = tuple(ObjectiveSpec(names[i], DIRECTION[names[i]]) for i in picked)

    pools = {"VM": vms, "Storage": storages}
    combos = [aggregate(c) for c in itertools.product(*(pools[s] for s in slots))]
    bounds = []
    for k, target in enumerate(names):
        if rng.random() < 0.6:
            values = np.array([c[target] for c in combos])
            if target == "cost":
                q = float(rng.uniform(0.3, 0.9))
                thr = round(float(np.quantile(values, q)), 2)
                bounds.append(AggregateBound(f"b{k}", f"{target} <= {thr}", "max", thr, target))
            else:
                q = float(rng.uniform(0.1, 0.6))
                thr = round(float(np.quantile(values, q)), 2)
                bounds.append(AggregateBound(f"b{k}", f"{target} >= {thr}", "min", thr, target))
    reqs = tuple(bounds) + (KeyValue("slots", "elements", ", ".join(slots)),)
    spec = OptimizationSpec(f"synthetic{seed}", objectives, reqs)
    catalogue = Catalogue(tuple(vms + storages), (VMImageEntry("aws", "ami-synthetic"),))
    return Instance(spec, catalogue, format_optimization(spec))
