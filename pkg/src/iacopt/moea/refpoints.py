"""Das-Dennis structured reference points on the unit simplex."""
from __future__ import annotations

from math import comb

import numpy as np


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def generate_reference_points(n_objectives: int, divisions: int) -> np.ndarray:
    """All points with coordinates in {0, 1/p, ..., 1} summing to one.

    Rows come out in lexicographic order of their coordinates; there are
    ``comb(p + M - 1, M - 1)`` of them.
    """
    if n_objectives < 2:
        raise ValueError("reference points need at least two objectives")
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    pts = np.array(list(_compositions(divisions, n_objectives)), dtype=float) / divisions
    assert len(pts) == comb(divisions + n_objectives - 1, n_objectives - 1)
    return pts


def default_population_size(n_points: int) -> int:
    """Smallest multiple of four not below the number of reference points."""
    return max(4, -(-n_points // 4) * 4)
