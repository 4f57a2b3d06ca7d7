"""Placement policies.

Each policy exposes ``place(pallet, warehouse, state, rng)`` and returns an
AssignmentDecision or raises CapacityError. Pallets are duck-typed: they
carry ``handle``, ``features`` and ``dos``. All policies are immutable and
deterministic given the rng state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol

import numpy as np

from dos_slotting import kernels
from dos_slotting.distribution import WarehouseDosDistribution, sample_dos
from dos_slotting.warehouse import (
    AssignmentDecision,
    CapacityError,
    OccupancyState,
    Warehouse,
    _decision,
    assign,
    target_location,
)

__all__ = [
    "Policy",
    "DosPolicy",
    "GreedyPolicy",
    "RandomPolicy",
    "ClassZones",
    "ClassPolicy",
    "TurnoverPolicy",
    "build_class_zones",
    "turnover_targets",
]


class Policy(Protocol):
    name: str

    def place(self, pallet, warehouse: Warehouse, state: OccupancyState, rng) -> AssignmentDecision: ...


@dataclass(frozen=True)
class DosPolicy:
    """The duration-of-stay rule: predict, sample a stay, target N*r*W(p)."""

    predictor: object  # QuantilePredictor
    dist: WarehouseDosDistribution
    name: str = "dos"

    def place(self, pallet, warehouse, state, rng) -> AssignmentDecision:
        qv = self.predictor.predict(pallet.features)
        p_hat = sample_dos(qv, rng)
        target = target_location(warehouse.size, self.dist.r_hat, self.dist, p_hat)
        return assign(warehouse, state, target, pallet.handle)


@dataclass(frozen=True)
class GreedyPolicy:
    """Closest available location, ignoring stay lengths and extra costs."""

    name: str = "greedy"

    def place(self, pallet, warehouse, state, rng) -> AssignmentDecision:
        rank = kernels.first_available(state.occupied)
        if rank < 0:
            raise CapacityError("warehouse full")
        return _decision(state, pallet.handle, rank, 0, 0.0)


@dataclass(frozen=True)
class RandomPolicy:
    """Uniform choice over the available set (control baseline)."""

    name: str = "random"

    def place(self, pallet, warehouse, state, rng) -> AssignmentDecision:
        n_free = state.available_count
        if n_free <= 0:
            raise CapacityError("warehouse full")
        rank = kernels.kth_available(state.occupied, int(rng.integers(n_free)))
        return _decision(state, pallet.handle, rank, 0, 0.0)


@dataclass(frozen=True)
class ClassZones:
    """Three contiguous rank bands with a product-group -> class mapping."""

    bounds: tuple[int, int]  # last rank of band A, last rank of band B
    class_of_group: Mapping[str, int]  # 0=A, 1=B, 2=C
    capacity: int

    def __post_init__(self):
        a, b = self.bounds
        if not 0 <= a <= b <= self.capacity:
            raise ValueError("bands must partition [1, N]")

    def band(self, cls: int) -> tuple[int, int]:
        a, b = self.bounds
        return ((1, a), (a + 1, b), (b + 1, self.capacity))[cls]

    def band_for(self, product_group: str) -> tuple[int, int]:
        # unmapped groups fall back to the middle band
        return self.band(self.class_of_group.get(product_group, 1))


def build_class_zones(
    turnover: Mapping[str, float], capacity: int, equal_bands: bool = False
) -> ClassZones:
    """ABC zoning from a turnover table.

    Groups are sorted by turnover descending and cut into three
    near-equal-count classes. Band sizes follow each class's share of total
    turnover (capacity matched to activity) unless ``equal_bands``.
    """
    if not turnover:
        raise ValueError("turnover table is empty")
    groups = sorted(turnover, key=lambda g: (-turnover[g], g))
    n = len(groups)
    cut1, cut2 = -(-n // 3), -(-2 * n // 3)  # ceil thirds
    class_of = {g: (0 if i < cut1 else 1 if i < cut2 else 2) for i, g in enumerate(groups)}

    if equal_bands:
        a = capacity // 3
        b = 2 * capacity // 3
    else:
        total = sum(turnover.values())
        share_a = sum(turnover[g] for g in groups[:cut1]) / total
        share_b = sum(turnover[g] for g in groups[cut1:cut2]) / total
        a = int(round(capacity * share_a))
        b = int(round(capacity * (share_a + share_b)))
        a = min(max(a, 0), capacity)
        b = min(max(b, a), capacity)
    return ClassZones(bounds=(a, b), class_of_group=dict(class_of), capacity=capacity)


@dataclass(frozen=True)
class ClassPolicy:
    """Closest available within the pallet's class band; spills to the
    nearest rank outside a full band, so the simulation stays total."""

    zones: ClassZones
    name: str = "class"

    def place(self, pallet, warehouse, state, rng) -> AssignmentDecision:
        lo, hi = self.zones.band_for(pallet.features.product_group)
        if lo > hi:  # empty band, e.g. zero turnover share
            lo = hi = min(self.zones.capacity, max(1, hi))
        rank = kernels.nearest_available_banded(state.occupied, lo, hi)
        if rank < 0:
            raise CapacityError("warehouse full")
        spill = float(max(lo - rank, 0) + max(rank - hi, 0))
        return _decision(state, pallet.handle, rank, hi, spill)


def turnover_targets(turnover: Mapping[str, float]) -> tuple[dict[str, float], float]:
    """Target percentile per group: turnover-mass share of strictly
    higher-turnover groups (highest turnover maps to the front).

    Returns the per-group percentiles and the fallback percentile for
    unseen groups (computed at the median turnover value).
    """
    if not turnover:
        raise ValueError("turnover table is empty")
    total = sum(turnover.values())
    if total <= 0:
        raise ValueError("total turnover must be positive")
    values = sorted(turnover.values(), reverse=True)
    percentiles = {
        g: sum(v for v in values if v > t) / total for g, t in turnover.items()
    }
    median_turnover = float(np.median(list(turnover.values())))
    fallback = sum(v for v in values if v > median_turnover) / total
    return percentiles, fallback


@dataclass(frozen=True)
class TurnoverPolicy:
    """Travel distance inversely proportional to product-group turnover."""

    percentiles: Mapping[str, float]
    fallback: float
    name: str = "turnover"

    @classmethod
    def from_table(cls, turnover: Mapping[str, float]) -> "TurnoverPolicy":
        percentiles, fallback = turnover_targets(turnover)
        return cls(percentiles=percentiles, fallback=fallback)

    def place(self, pallet, warehouse, state, rng) -> AssignmentDecision:
        pct = self.percentiles.get(pallet.features.product_group, self.fallback)
        n = warehouse.size
        target = min(n, max(1, int(np.floor(n * pct + 0.5))))
        return assign(warehouse, state, target, pallet.handle)
