"""Numpy implementations of the placement kernels.

Rank arrays are 0-indexed: entry ``r - 1`` describes rank ``r`` (ranks are
1-based everywhere else). All functions return a rank in ``1..N`` or -1 when
no location is available.
"""

import numpy as np

BACKEND = "python"


def nearest_available(occupied: np.ndarray, target: int) -> int:
    """Free rank minimizing |target - rank|, ties toward the dock."""
    free = np.flatnonzero(occupied == 0)
    if free.size == 0:
        return -1
    ranks = free + 1
    # ranks ascending, so argmin lands on the smaller rank at equal distance
    return int(ranks[np.argmin(np.abs(ranks - target))])


def nearest_available_with_cost(
    occupied: np.ndarray, target: int, extra_cost: np.ndarray
) -> int:
    """Free rank minimizing |target - rank| + extra_cost, ties toward the dock."""
    free = np.flatnonzero(occupied == 0)
    if free.size == 0:
        return -1
    ranks = free + 1
    cost = np.abs(ranks - target) + extra_cost[free]
    return int(ranks[np.argmin(cost)])


def first_available(occupied: np.ndarray) -> int:
    free = np.flatnonzero(occupied == 0)
    if free.size == 0:
        return -1
    return int(free[0]) + 1


def kth_available(occupied: np.ndarray, k: int) -> int:
    """k-th free rank in ascending order (k is 0-based)."""
    free = np.flatnonzero(occupied == 0)
    if k < 0 or k >= free.size:
        return -1
    return int(free[k]) + 1


def nearest_available_banded(occupied: np.ndarray, lo: int, hi: int) -> int:
    """Free rank minimizing (distance to [lo, hi], rank) lexicographically.

    Distance is 0 inside the band, so in-band ranks win and the lowest in-band
    rank is chosen; otherwise the nearest spill location, ties toward the dock.
    """
    free = np.flatnonzero(occupied == 0)
    if free.size == 0:
        return -1
    ranks = free + 1
    dist = np.maximum(lo - ranks, 0) + np.maximum(ranks - hi, 0)
    return int(ranks[np.argmin(dist)])
