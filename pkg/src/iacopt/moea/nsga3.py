"""Reference-point survival selection for NSGA-III."""
from __future__ import annotations

import numpy as np

SPAN_FLOOR = 1e-6
ASF_WEIGHT_FLOOR = 1e-6


def ideal_point(F: np.ndarray) -> np.ndarray:
    return F.min(axis=0)


def intercepts(Ft: np.ndarray) -> tuple[np.ndarray, bool]:
    """Hyperplane intercepts of the translated objectives ``Ft``.

    Extreme points minimize the achievement scalarizing function with axis
    weights. Returns ``(intercepts, degenerate)``; when the extreme-point
    system is singular or yields non-positive intercepts, the per-objective
    maxima are used instead. Intercepts never drop below ``SPAN_FLOOR``.
    """
    m = Ft.shape[1]
    extremes = np.empty((m, m))
    for j in range(m):
        w = np.full(m, ASF_WEIGHT_FLOOR)
        w[j] = 1.0
        asf = (Ft / w).max(axis=1)
        extremes[j] = Ft[int(np.argmin(asf))]
    degenerate = False
    try:
        b = np.linalg.solve(extremes, np.ones(m))
        with np.errstate(divide="ignore"):
            a = 1.0 / b
        if not np.all(np.isfinite(a)) or np.any(a <= SPAN_FLOOR):
            degenerate = True
    except np.linalg.LinAlgError:
        degenerate = True
    if degenerate:
        a = Ft.max(axis=0)
    return np.maximum(a, SPAN_FLOOR), degenerate


def normalize(F: np.ndarray) -> tuple[np.ndarray, bool]:
    """Translate by the ideal point and scale by the estimated nadir span."""
    Ft = F - ideal_point(F)
    a, degenerate = intercepts(Ft)
    return Ft / a, degenerate


def associate(Fn: np.ndarray, refs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference line (by perpendicular distance) for every row of ``Fn``."""
    unit = refs / np.linalg.norm(refs, axis=1, keepdims=True)
    proj = Fn @ unit.T  # n x H scalar projections
    # |f - (f.u)u| for every pair
    diff = Fn[:, None, :] - proj[:, :, None] * unit[None, :, :]
    d = np.linalg.norm(diff, axis=2)
    idx = d.argmin(axis=1)
    return idx, d[np.arange(len(Fn)), idx]


def niching(
    n_select: int,
    niche_count: np.ndarray,
    ref_idx: np.ndarray,
    dist: np.ndarray,
    last_front: list[int],
    rng: np.random.Generator,
) -> list[int]:
    """Pick ``n_select`` members of ``last_front`` favouring sparsely populated reference lines."""
    niche_count = niche_count.copy()
    pool = list(last_front)
    chosen: list[int] = []
    excluded = np.zeros(len(niche_count), dtype=bool)
    while len(chosen) < n_select:
        counts = np.where(excluded, np.iinfo(np.int64).max, niche_count)
        lowest = np.flatnonzero(counts == counts.min())
        j = int(lowest[rng.integers(len(lowest))]) if len(lowest) > 1 else int(lowest[0])
        members = [i for i in pool if ref_idx[i] == j]
        if not members:
            excluded[j] = True
            continue
        if niche_count[j] == 0:
            pick = min(members, key=lambda i: (dist[i], i))
        else:
            pick = members[int(rng.integers(len(members)))]
        chosen.append(pick)
        pool.remove(pick)
        niche_count[j] += 1
    return chosen


def nsga3_survival(population, fronts: list[list[int]], n: int, refs: np.ndarray, rng: np.random.Generator) -> list[int]:
    """Indices of the ``n`` survivors of the merged ``population``."""
    kept: list[int] = []
    last: list[int] = []
    for front in fronts:
        if len(kept) + len(front) <= n:
            kept += front
            if len(kept) == n:
                return kept
        else:
            last = front
            break
    F = np.array([getattr(p, "solution", p).internal_values for p in population], dtype=float)
    Fn, _ = normalize(F)
    ref_idx, dist = associate(Fn, refs)
    niche_count = np.bincount(ref_idx[kept], minlength=len(refs)) if kept else np.zeros(len(refs), dtype=np.int64)
    return kept + niching(n - len(kept), niche_count, ref_idx, dist, last, rng)
