"""Constrained dominance, fast non-dominated sorting and crowding distance.

All comparisons use ``internal_values`` (every objective minimized). Among
solutions, feasibility comes first, then total constraint violation, then
Pareto dominance.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np


def _sol(x):
    return getattr(x, "solution", x)


def pareto_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def constrained_dominates(a, b) -> bool:
    """True iff ``a`` constrained-dominates ``b`` (Individuals or EvaluatedSolutions)."""
    a, b = _sol(a), _sol(b)
    if len(a.internal_values) != len(b.internal_values):
        raise ValueError("dimension mismatch between solutions")
    fa, fb = a.constraints.feasible, b.constraints.feasible
    if fa and not fb:
        return True
    if fb and not fa:
        return False
    if not fa:
        return a.constraints.total_violation < b.constraints.total_violation
    return pareto_dominates(a.internal_values, b.internal_values)


def dominance_matrix(population) -> np.ndarray:
    """``D[i, j]`` is True when member i constrained-dominates member j."""
    sols = [_sol(p) for p in population]
    F = np.array([s.internal_values for s in sols], dtype=float)
    viol = np.array([s.constraints.total_violation for s in sols], dtype=float)
    feas = np.array([s.constraints.feasible for s in sols], dtype=bool)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    fi, fj = feas[:, None], feas[None, :]
    return (
        (fi & ~fj)
        | (~fi & ~fj & (viol[:, None] < viol[None, :]))
        | (fi & fj & le & lt)
    )


def fast_non_dominated_sort(population) -> list[list[int]]:
    """Partition indices into fronts; front 0 is the non-dominated set.

    Indices inside a front are ascending.
    """
    n = len(population)
    if n == 0:
        raise ValueError("cannot sort an empty population")
    D = dominance_matrix(population)
    dominated_by = D.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    current = np.flatnonzero(dominated_by == 0)
    while current.size:
        fronts.append(current.tolist())
        assigned[current] = True
        dominated_by = dominated_by - D[current].sum(axis=0)
        current = np.flatnonzero((dominated_by == 0) & ~assigned)
    return fronts


def crowding_distance(values) -> np.ndarray:
    """Crowding distance of each row of ``values`` (one front, internal orientation).

    Points holding an objective's minimum or maximum are boundaries (+inf).
    Interior points accumulate the normalized gap between the nearest
    strictly smaller and strictly larger values. Objectives with zero span
    are skipped. Measuring gaps between distinct values makes the result
    independent of input order even when values tie.
    """
    F = np.asarray(values, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    k, m = F.shape
    dist = np.zeros(k)
    if k <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        col = F[:, j]
        lo, hi = col.min(), col.max()
        span = hi - lo
        if span == 0:
            continue
        levels = np.unique(col)
        pos = np.searchsorted(levels, col)
        boundary = (pos == 0) | (pos == len(levels) - 1)
        inner = ~boundary
        gap = np.zeros(k)
        gap[inner] = (levels[pos[inner] + 1] - levels[pos[inner] - 1]) / span
        dist += gap
        dist[boundary] = np.inf
    return dist
