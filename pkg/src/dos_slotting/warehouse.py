"""Warehouse geometry, occupancy state, and the placement primitives.

Locations are ranked 1..N by ascending travel time from the staging area
(ties broken by location id). The default geometry is a 1-D aisle:
travel time of rank r is r time units and distances are rank differences.
A custom pairwise distance callable can be supplied for other layouts, at
the cost of the generic (slower) assignment path.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Callable, Optional

import numpy as np

from dos_slotting import kernels
from dos_slotting.metrics import placement_percentile

__all__ = [
    "Warehouse",
    "OccupancyState",
    "AssignmentDecision",
    "CapacityError",
    "StateError",
    "target_location",
    "assign",
    "retrieve",
]


class CapacityError(RuntimeError):
    """No available location; the simulator treats this as an overflow event."""


class StateError(RuntimeError):
    """Inconsistent occupancy operation (e.g. retrieving an unknown pallet)."""


@dataclass(frozen=True)
class Warehouse:
    """Immutable geometry: travel times, rank order, extra storage costs."""

    travel_time: np.ndarray  # by location index
    extra_cost: np.ndarray  # by location index
    labels: tuple[str, ...]
    # optional pairwise distance over location indices; None = rank distance
    distance: Optional[Callable[[int, int], float]] = None

    def __post_init__(self):
        t = np.asarray(self.travel_time, dtype=np.float64)
        c = np.asarray(self.extra_cost, dtype=np.float64)
        if t.size == 0:
            raise ValueError("warehouse needs at least one location")
        if np.any(t <= 0):
            raise ValueError("travel times must be positive")
        if np.any(c < 0):
            raise ValueError("extra costs must be nonnegative")
        object.__setattr__(self, "travel_time", t)
        object.__setattr__(self, "extra_cost", c)
        order = np.lexsort((np.arange(t.size), t))  # by (travel_time, id)
        loc_of_rank = np.empty(t.size + 1, dtype=np.int64)
        loc_of_rank[0] = -1
        loc_of_rank[1:] = order
        rank_of_loc = np.empty(t.size, dtype=np.int64)
        rank_of_loc[order] = np.arange(1, t.size + 1)
        object.__setattr__(self, "_loc_of_rank", loc_of_rank)
        object.__setattr__(self, "_rank_of_loc", rank_of_loc)
        object.__setattr__(self, "_travel_of_rank", t[order])
        object.__setattr__(self, "_cost_of_rank", c[order])

    @property
    def size(self) -> int:
        return int(self.travel_time.size)

    def location_at(self, rank: int) -> int:
        return int(self._loc_of_rank[rank])

    def rank_of(self, location: int) -> int:
        return int(self._rank_of_loc[location])

    def travel_at_rank(self, rank: int) -> float:
        return float(self._travel_of_rank[rank - 1])

    @property
    def has_extra_cost(self) -> bool:
        return bool(np.any(self.extra_cost > 0))

    @classmethod
    def aisle(cls, n: int, extra_cost: Optional[np.ndarray] = None) -> "Warehouse":
        """1-D aisle: location i has travel time i+1; rank == id order."""
        if n < 1:
            raise ValueError("need at least one location")
        c = np.zeros(n) if extra_cost is None else np.asarray(extra_cost, dtype=np.float64)
        return cls(
            travel_time=np.arange(1, n + 1, dtype=np.float64),
            extra_cost=c,
            labels=tuple(f"L{i + 1:04d}" for i in range(n)),
        )

    @classmethod
    def from_geometry_file(cls, source: IO[str]) -> "Warehouse":
        """Read a geometry CSV with columns location_id, travel_time, extra_cost."""
        reader = csv.DictReader(source)
        required = {"location_id", "travel_time", "extra_cost"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"geometry file must have columns {sorted(required)}")
        labels, travel, cost = [], [], []
        for row in reader:
            labels.append(row["location_id"])
            travel.append(float(row["travel_time"]))
            cost.append(float(row["extra_cost"]))
        return cls(
            travel_time=np.array(travel),
            extra_cost=np.array(cost),
            labels=tuple(labels),
        )


@dataclass(frozen=True)
class AssignmentDecision:
    pallet: int
    location: int
    rank: int
    target_rank: int  # 0 when the policy has no target
    travel_time: float
    assign_cost: float  # d(target, chosen) + c(chosen)
    percentile: float


class OccupancyState:
    """Mutable occupancy bookkeeping; single writer (the simulation loop).

    Tracks which rank holds which pallet plus the running travel-time sum
    of occupied locations, so per-period cost accumulation is O(1).
    """

    def __init__(self, warehouse: Warehouse):
        self.warehouse = warehouse
        n = warehouse.size
        self.occupied = np.zeros(n, dtype=np.uint8)  # index r-1 for rank r
        self.pallet_at = np.full(n, -1, dtype=np.int64)
        self.rank_of_pallet: dict[int, int] = {}
        self.resident_count = 0
        self.occupied_travel_sum = 0.0
        self.clock = 0

    @property
    def available_count(self) -> int:
        return self.warehouse.size - self.resident_count

    def store(self, pallet: int, rank: int) -> None:
        idx = rank - 1
        if self.occupied[idx]:
            raise StateError(f"rank {rank} already occupied")
        if pallet in self.rank_of_pallet:
            raise StateError(f"pallet {pallet} already stored")
        self.occupied[idx] = 1
        self.pallet_at[idx] = pallet
        self.rank_of_pallet[pallet] = rank
        self.resident_count += 1
        self.occupied_travel_sum += self.warehouse.travel_at_rank(rank)

    def free(self, pallet: int) -> int:
        rank = self.rank_of_pallet.pop(pallet, None)
        if rank is None:
            raise StateError(f"pallet {pallet} is not stored")
        idx = rank - 1
        self.occupied[idx] = 0
        self.pallet_at[idx] = -1
        self.resident_count -= 1
        self.occupied_travel_sum -= self.warehouse.travel_at_rank(rank)
        return rank

    def residents(self) -> list[tuple[int, int]]:
        """(pallet, rank) pairs, rank ascending."""
        return sorted((p, r) for p, r in self.rank_of_pallet.items())


def target_location(n: int, r_hat: float, w_hat, p_hat: float) -> int:
    """Stay-ordered target rank: round(N * r_hat * W(p_hat)), clamped to [1, N].

    ``w_hat`` is either a WarehouseDosDistribution or a callable t -> W(t).
    Rounding is to the nearest integer, half away from zero.
    """
    if not 0.0 < r_hat <= 1.0:
        raise ValueError("r_hat must lie in (0, 1]")
    if p_hat < 0:
        raise ValueError("predicted stay must be nonnegative")
    w = w_hat.w_at(p_hat) if hasattr(w_hat, "w_at") else w_hat(p_hat)
    raw = n * r_hat * w
    rank = int(math.floor(raw + 0.5))
    return min(n, max(1, rank))


def _decision(
    state: OccupancyState, pallet: int, rank: int, target_rank: int, assign_cost: float
) -> AssignmentDecision:
    wh = state.warehouse
    state.store(pallet, rank)
    return AssignmentDecision(
        pallet=pallet,
        location=wh.location_at(rank),
        rank=rank,
        target_rank=target_rank,
        travel_time=wh.travel_at_rank(rank),
        assign_cost=assign_cost,
        percentile=placement_percentile(rank, wh.size),
    )


def assign(
    warehouse: Warehouse, state: OccupancyState, target_rank: int, pallet: int
) -> AssignmentDecision:
    """Store ``pallet`` at the available location minimizing d(target, w) + c(w).

    Ties break toward smaller travel time, then smaller location id (which
    is exactly ascending rank). Raises CapacityError when nothing is free.
    """
    if state.resident_count >= warehouse.size:
        raise CapacityError("warehouse full")
    if warehouse.distance is not None:
        rank, cost = _assign_generic(warehouse, state, target_rank)
    elif warehouse.has_extra_cost:
        rank = kernels.nearest_available_with_cost(
            state.occupied, target_rank, warehouse._cost_of_rank
        )
        cost = abs(target_rank - rank) + warehouse._cost_of_rank[rank - 1]
    else:
        rank = kernels.nearest_available(state.occupied, target_rank)
        cost = float(abs(target_rank - rank))
    return _decision(state, pallet, rank, target_rank, float(cost))


def _assign_generic(
    warehouse: Warehouse, state: OccupancyState, target_rank: int
) -> tuple[int, float]:
    target_loc = warehouse.location_at(target_rank)
    best_rank, best_cost = -1, 0.0
    for idx in np.flatnonzero(state.occupied == 0):
        rank = int(idx) + 1
        loc = warehouse.location_at(rank)
        cost = warehouse.distance(target_loc, loc) + warehouse.extra_cost[loc]
        if best_rank < 0 or cost < best_cost:  # rank ascending handles ties
            best_rank, best_cost = rank, cost
    return best_rank, float(best_cost)


def retrieve(state: OccupancyState, pallet: int) -> int:
    """Return the pallet's location to the available set; gives its rank."""
    return state.free(pallet)
