"""Discrete-time warehouse simulation.

Period semantics: departures are processed before arrivals within a period
(outgoing pallets are replaced by incoming ones in the balanced regime), and
a pallet stored in period t with stay d occupies its location during periods
t .. t+d-1. The objective accumulates 4 * travel_time per occupied location
per period over the stream's period window; the per-visit travel total
(4 * travel_time per placement) is reported alongside as travel_cost.

Arrivals that find the warehouse full wait in a staging queue and retry the
next period; every failed attempt counts as an overflow event.
"""

from __future__ import annotations

import datetime as dt
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from dos_slotting.distribution import WarehouseDosDistribution, warehouse_distribution_from_masses
from dos_slotting.predictor import OraclePredictor
from dos_slotting.records import PalletRecord, ShipmentFeatures
from dos_slotting.warehouse import CapacityError, OccupancyState, Warehouse

__all__ = [
    "DEFAULT_PRESSURED_SPEC",
    "DEFAULT_PRESSURED_CAPACITY",
    "StreamPallet",
    "PeriodicArrivals",
    "ArrivalStream",
    "StateSnapshot",
    "PlacementRecord",
    "SimulationResult",
    "SearchLimitExceeded",
    "generate_perfect_balance_stream",
    "steady_masses",
    "distribution_for_spec",
    "oracle_for_stream",
    "verify_perfect_balance",
    "perfect_balance_violations",
    "split_stream",
    "stream_from_records",
    "run_simulation",
    "recount_cost",
    "brute_force_optimal",
    "turnover_from_stream",
    "compare_policies",
    "ComparisonResult",
]

_BASE_DATE = dt.date(2000, 1, 1)

# Default pressured balanced scenario: steady-state load 156 pallets, i.e.
# occupancy ~0.78 on a 200-location aisle, stay lengths spread 1..32.
DEFAULT_PRESSURED_SPEC: dict[int, int] = {1: 24, 2: 12, 3: 4, 4: 6, 8: 3, 16: 1, 32: 1}
DEFAULT_PRESSURED_CAPACITY = 200


@dataclass(frozen=True)
class StreamPallet:
    handle: int
    features: ShipmentFeatures
    dos: int


@dataclass(frozen=True)
class PeriodicArrivals:
    """``count`` arrivals every ``every`` periods at the given phase.

    The pattern period must divide the stay length so the balance identity
    n_p(t - p) = n_p(t) holds.
    """

    count: int
    every: int
    phase: int = 1

    def __post_init__(self):
        if self.count < 1 or self.every < 1:
            raise ValueError("count and every must be >= 1")
        if not 1 <= self.phase <= self.every:
            raise ValueError("phase must lie in [1, every]")

    def count_at(self, period: int) -> int:
        return self.count if period % self.every == self.phase % self.every else 0


StreamSpec = Mapping[int, "int | PeriodicArrivals"]


@dataclass(frozen=True)
class ArrivalStream:
    first_period: int
    horizon: int  # inclusive last period
    arrivals: dict[int, tuple[StreamPallet, ...]]

    def periods(self) -> range:
        return range(self.first_period, self.horizon + 1)

    def arrivals_at(self, t: int) -> tuple[StreamPallet, ...]:
        return self.arrivals.get(t, ())

    @property
    def total_arrivals(self) -> int:
        return sum(len(v) for v in self.arrivals.values())

    def all_pallets(self) -> Iterable[StreamPallet]:
        for t in self.periods():
            yield from self.arrivals_at(t)

    def arrival_counts(self) -> dict[int, dict[int, int]]:
        """n_p(t): per stay length, arrivals per period."""
        counts: dict[int, dict[int, int]] = {}
        for t in self.periods():
            for pallet in self.arrivals_at(t):
                counts.setdefault(pallet.dos, {}).setdefault(t, 0)
                counts[pallet.dos][t] += 1
        return counts

    def peak_residents(self) -> int:
        """Max concurrent residents if every pallet were stored on arrival."""
        if self.total_arrivals == 0:
            return 0
        max_depart = max(
            t + p.dos for t in self.periods() for p in self.arrivals_at(t)
        )
        delta = np.zeros(max_depart - self.first_period + 2, dtype=np.int64)
        for t in self.periods():
            for p in self.arrivals_at(t):
                delta[t - self.first_period] += 1
                delta[t + p.dos - self.first_period] -= 1
        return int(np.cumsum(delta).max())


def _normalize_spec(spec: StreamSpec) -> dict[int, PeriodicArrivals]:
    if not spec:
        raise ValueError("stream spec is empty")
    normalized = {}
    for p, entry in spec.items():
        p = int(p)
        if p < 1:
            raise ValueError("stay lengths must be >= 1")
        if isinstance(entry, PeriodicArrivals):
            pa = entry
        elif isinstance(entry, (tuple, list)):
            pa = PeriodicArrivals(*entry)
        else:
            pa = PeriodicArrivals(count=int(entry), every=1)
        if p % pa.every != 0:
            raise ValueError(
                f"arrival pattern period {pa.every} must divide the stay length {p}"
            )
        normalized[p] = pa
    return normalized


def steady_masses(spec: StreamSpec) -> dict[int, float]:
    """Steady-state resident count z_p per stay length implied by the arrival spec."""
    return {p: pa.count * (p // pa.every) for p, pa in _normalize_spec(spec).items()}


def distribution_for_spec(spec: StreamSpec, capacity: int) -> WarehouseDosDistribution:
    """Exact warehouse distribution (z, W, r) implied by a balanced spec."""
    return warehouse_distribution_from_masses(steady_masses(spec), capacity)


def _sim_features(p: int, t: int, shipment_id: str) -> ShipmentFeatures:
    return ShipmentFeatures(
        shipment_id=shipment_id,
        arrival_date=_BASE_DATE + dt.timedelta(days=t - 1),
        warehouse_id="SIM",
        customer_type="sim",
        product_group=f"D{p:03d}",
        pallet_weight=100.0,
        inbound_location="staging",
        outbound_location="dock",
        description=f"class d{p:03d} goods",
    )


def generate_perfect_balance_stream(
    spec: StreamSpec,
    horizon: int,
    seed: int,
    first_period: int = 1,
    shuffle: bool = True,
) -> ArrivalStream:
    """Arrival stream satisfying the balance identity n_p(t - p) = n_p(t).

    Spec values are either an integer (that many arrivals of the stay length
    every period) or a PeriodicArrivals pattern. Pallets arriving in one
    period with one stay length form one shipment. The seed only shuffles
    within-period arrival order; marginal counts are untouched.
    """
    normalized = _normalize_spec(spec)
    if horizon < first_period:
        raise ValueError("horizon before first period")
    rng = np.random.default_rng(seed)
    arrivals: dict[int, tuple[StreamPallet, ...]] = {}
    handle = 0
    for t in range(first_period, horizon + 1):
        period_pallets: list[StreamPallet] = []
        for p in sorted(normalized):
            n = normalized[p].count_at(t)
            if n == 0:
                continue
            sid = f"P{p:03d}T{t:06d}"
            features = _sim_features(p, t, sid)
            for _ in range(n):
                handle += 1
                period_pallets.append(StreamPallet(handle=handle, features=features, dos=p))
        if shuffle and len(period_pallets) > 1:
            order = rng.permutation(len(period_pallets))
            period_pallets = [period_pallets[i] for i in order]
        if period_pallets:
            arrivals[t] = tuple(period_pallets)
    return ArrivalStream(first_period=first_period, horizon=horizon, arrivals=arrivals)


def perfect_balance_violations(stream: ArrivalStream) -> tuple[int, int]:
    """(violations, pairs checked) of the identity n_p(t - p) = n_p(t)."""
    counts = stream.arrival_counts()
    violations = 0
    checked = 0
    for p, per_period in counts.items():
        for t in range(stream.first_period + p, stream.horizon + 1):
            checked += 1
            if per_period.get(t, 0) != per_period.get(t - p, 0):
                violations += 1
    return violations, checked


def verify_perfect_balance(stream: ArrivalStream) -> bool:
    violations, _ = perfect_balance_violations(stream)
    return violations == 0


def split_stream(stream: ArrivalStream, head_periods: int) -> tuple[ArrivalStream, ArrivalStream]:
    """Split into the first ``head_periods`` periods and the remainder."""
    cut = stream.first_period + head_periods  # first period of the tail
    if not stream.first_period <= cut <= stream.horizon + 1:
        raise ValueError("split outside the stream window")
    head = {t: v for t, v in stream.arrivals.items() if t < cut}
    tail = {t: v for t, v in stream.arrivals.items() if t >= cut}
    return (
        ArrivalStream(stream.first_period, cut - 1, head),
        ArrivalStream(cut, stream.horizon, tail),
    )


def oracle_for_stream(stream: ArrivalStream) -> OraclePredictor:
    """Oracle over the stream's shipments (their realized stay lengths)."""
    by_shipment: dict[str, list[int]] = {}
    for pallet in stream.all_pallets():
        by_shipment.setdefault(pallet.features.shipment_id, []).append(pallet.dos)
    from dos_slotting.distribution import empirical_cdf, quantile_vector

    return OraclePredictor(
        {sid: quantile_vector(empirical_cdf(dos)) for sid, dos in by_shipment.items()}
    )


def stream_from_records(records: Sequence[PalletRecord], first_period: int = 1) -> ArrivalStream:
    """Replay historical-format records as a daily arrival stream.

    The horizon extends to the last occupied day so every stay completes
    within the window.
    """
    if not records:
        raise ValueError("no records")
    start = min(r.arrival_date for r in records)
    arrivals: dict[int, list[StreamPallet]] = {}
    horizon = first_period
    for handle, r in enumerate(records, start=1):
        t = first_period + (r.arrival_date - start).days
        features = ShipmentFeatures(
            shipment_id=r.shipment_id,
            arrival_date=r.arrival_date,
            warehouse_id=r.warehouse_id,
            customer_type=r.customer_type,
            product_group=r.product_group,
            pallet_weight=r.pallet_weight,
            inbound_location=r.inbound_location,
            outbound_location=r.outbound_location,
            description=r.description,
        )
        arrivals.setdefault(t, []).append(StreamPallet(handle, features, r.dos_days))
        horizon = max(horizon, t + r.dos_days - 1)
    return ArrivalStream(
        first_period=first_period,
        horizon=horizon,
        arrivals={t: tuple(v) for t, v in arrivals.items()},
    )


# --- simulation ----------------------------------------------------------


@dataclass(frozen=True)
class StateSnapshot:
    """Occupancy at the start of ``period``: (location, departure period)."""

    period: int
    residents: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PlacementRecord:
    period: int
    handle: int
    shipment_id: str
    dos: int
    location: int
    rank: int
    travel_time: float
    target_rank: int
    percentile: float
    assign_cost: float


@dataclass
class SimulationResult:
    policy_name: str
    seed: int
    first_period: int
    horizon: int
    total_cost: float
    travel_cost: float
    placements: list[PlacementRecord]
    placement_percentiles: np.ndarray
    overflow_events: int
    unplaced: int
    initial_residents: tuple[tuple[int, int], ...]
    end_state: StateSnapshot

    @property
    def mean_percentile(self) -> float:
        return float(self.placement_percentiles.mean()) if self.placement_percentiles.size else 0.0

    @property
    def median_percentile(self) -> float:
        return float(np.median(self.placement_percentiles)) if self.placement_percentiles.size else 0.0


def run_simulation(
    stream: ArrivalStream,
    warehouse: Warehouse,
    policy,
    seed: int,
    initial_state: StateSnapshot | None = None,
) -> SimulationResult:
    """Run one policy over one stream; fully determined by its arguments."""
    state = OccupancyState(warehouse)
    departures: dict[int, list[int]] = {}
    initial_residents: tuple[tuple[int, int], ...] = ()
    if initial_state is not None:
        if initial_state.period != stream.first_period:
            raise ValueError("snapshot period does not match the stream window")
        initial_residents = initial_state.residents
        for i, (loc, depart) in enumerate(initial_residents):
            handle = -(i + 1)  # synthetic handles, disjoint from stream handles
            state.store(handle, warehouse.rank_of(loc))
            departures.setdefault(depart, []).append(handle)

    rng = np.random.default_rng(seed)
    staged: deque[StreamPallet] = deque()
    placements: list[PlacementRecord] = []
    percentiles: list[float] = []
    depart_of: dict[int, int] = {}
    overflow = 0
    total_cost = 0.0
    travel_cost = 0.0

    for t in stream.periods():
        state.clock = t
        for handle in departures.pop(t, ()):
            state.free(handle)
        pending = list(staged) + list(stream.arrivals_at(t))
        staged.clear()
        for pallet in pending:
            try:
                decision = policy.place(pallet, warehouse, state, rng)
            except CapacityError:
                overflow += 1
                staged.append(pallet)
                continue
            depart = t + pallet.dos
            departures.setdefault(depart, []).append(pallet.handle)
            depart_of[pallet.handle] = depart
            travel_cost += 4.0 * decision.travel_time
            percentiles.append(decision.percentile)
            placements.append(
                PlacementRecord(
                    period=t,
                    handle=pallet.handle,
                    shipment_id=pallet.features.shipment_id,
                    dos=pallet.dos,
                    location=decision.location,
                    rank=decision.rank,
                    travel_time=decision.travel_time,
                    target_rank=decision.target_rank,
                    percentile=decision.percentile,
                    assign_cost=decision.assign_cost,
                )
            )
        total_cost += 4.0 * state.occupied_travel_sum

    residents = []
    initial_departs = {-(i + 1): depart for i, (_, depart) in enumerate(initial_residents)}
    for handle, rank in state.residents():
        depart = depart_of.get(handle, initial_departs.get(handle))
        residents.append((warehouse.location_at(rank), depart))
    end_state = StateSnapshot(period=stream.horizon + 1, residents=tuple(sorted(residents)))

    return SimulationResult(
        policy_name=getattr(policy, "name", type(policy).__name__),
        seed=seed,
        first_period=stream.first_period,
        horizon=stream.horizon,
        total_cost=total_cost,
        travel_cost=travel_cost,
        placements=placements,
        placement_percentiles=np.array(percentiles),
        overflow_events=overflow,
        unplaced=len(staged),
        initial_residents=initial_residents,
        end_state=end_state,
    )


def recount_cost(result: SimulationResult, warehouse: Warehouse) -> float:
    """Recompute the objective from the decision ledger (independent of the
    online accumulator): each stored pallet contributes 4 * travel * periods
    resident within the measured window."""
    first, last = result.first_period, result.horizon
    total = 0.0
    for loc, depart in result.initial_residents:
        periods = min(depart - 1, last) - first + 1
        if periods > 0:
            total += 4.0 * warehouse.travel_time[loc] * periods
    for rec in result.placements:
        periods = min(rec.period + rec.dos - 1, last) - rec.period + 1
        if periods > 0:
            total += 4.0 * rec.travel_time * periods
    return total


class SearchLimitExceeded(RuntimeError):
    def __init__(self, estimate: float, limit: float):
        super().__init__(
            f"exhaustive search refused: ~{estimate:.3g} branches exceed the limit {limit:.3g}"
        )
        self.estimate = estimate
        self.limit = limit


def brute_force_optimal(
    stream: ArrivalStream,
    warehouse: Warehouse,
    limit: float = 1e7,
    initial_state: StateSnapshot | None = None,
) -> float:
    """Minimal objective over all feasible location choices per arrival.

    Departures are processed exactly as in run_simulation. Staging is not
    modeled: a branch with no free location is infeasible, so instances must
    fit within capacity. Refuses instances whose branching product exceeds
    ``limit``.
    """
    n = warehouse.size
    events: list[tuple[int, int]] = []  # (period, dos) in stream order
    for t in stream.periods():
        for pallet in stream.arrivals_at(t):
            events.append((t, pallet.dos))

    first, last = stream.first_period, stream.horizon
    depart_by_rank = [0] * n
    fixed = 0.0
    if initial_state is not None:
        if initial_state.period != first:
            raise ValueError("snapshot period does not match the stream window")
        for loc, depart in initial_state.residents:
            rank = warehouse.rank_of(loc)
            depart_by_rank[rank - 1] = depart
            periods = min(depart - 1, last) - first + 1
            if periods > 0:
                fixed += 4.0 * warehouse.travel_time[loc] * periods

    # The resident count at each event is choice-independent, so the
    # branching product is exact; refuse before searching.
    residents = sum(1 for d in depart_by_rank if d > 0)
    depart_counts: dict[int, int] = {}
    for d in depart_by_rank:
        if d:
            depart_counts[d] = depart_counts.get(d, 0) + 1
    bound = 1.0
    prev_period = None
    for t, dos in events:
        if t != prev_period:
            for past in [d for d in depart_counts if d <= t]:
                residents -= depart_counts.pop(past)
            prev_period = t
        free = n - residents
        if free <= 0:
            raise CapacityError(f"no free location at period {t}; instance overfull")
        bound *= free
        if bound > limit:
            raise SearchLimitExceeded(bound, limit)
        residents += 1
        depart_counts[t + dos] = depart_counts.get(t + dos, 0) + 1

    travel_of_rank = [warehouse.travel_at_rank(r) for r in range(1, n + 1)]
    memo: dict[tuple[int, tuple[int, ...]], float] = {}

    def search(i: int, occupancy: tuple[int, ...]) -> float:
        if i == len(events):
            return 0.0
        t, dos = events[i]
        occupancy = tuple(0 if d <= t else d for d in occupancy)
        key = (i, occupancy)
        hit = memo.get(key)
        if hit is not None:
            return hit
        periods = min(t + dos - 1, last) - t + 1
        depart = t + dos
        best = float("inf")
        occ = list(occupancy)
        for idx in range(n):
            if occ[idx]:
                continue
            occ[idx] = depart
            cost = 4.0 * travel_of_rank[idx] * periods + search(i + 1, tuple(occ))
            occ[idx] = 0
            if cost < best:
                best = cost
        memo[key] = best
        return best

    return float(fixed + search(0, tuple(depart_by_rank)))


@dataclass
class ComparisonResult:
    rows: list[dict]
    aggregates: dict[str, dict]
    histograms: dict[str, tuple[np.ndarray, np.ndarray]]  # policy -> (edges, counts)


def turnover_from_stream(stream: ArrivalStream) -> dict[str, float]:
    """Retrieval frequency per product group (retrievals per period;
    footprint is 1 for single-size pallets, so this is also the inverse
    cube-per-order index)."""
    counts: dict[str, int] = {}
    for pallet in stream.all_pallets():
        group = pallet.features.product_group
        counts[group] = counts.get(group, 0) + 1
    n_periods = stream.horizon - stream.first_period + 1
    return {g: c / n_periods for g, c in counts.items()}


def compare_policies(
    stream: ArrivalStream | Callable[[int], ArrivalStream],
    warehouse: Warehouse,
    policies: Sequence[tuple[str, object]],
    seeds: Sequence[int],
    warmup_periods: int = 0,
    histogram_bins: int = 20,
) -> ComparisonResult:
    """Run every policy over every seed and aggregate.

    ``stream`` may be a fixed stream or a seed -> stream factory (the usual
    setup, so within-period arrival order varies across seeds). With a
    warm-up, each policy first fills the warehouse over the leading periods
    and is measured on the remainder from its own end state.
    """
    if not policies:
        raise ValueError("no policies")
    if not seeds:
        raise ValueError("no seeds")
    rows = []
    pooled: dict[str, list[np.ndarray]] = {name: [] for name, _ in policies}
    for name, policy in policies:
        for seed in seeds:
            s = stream(seed) if callable(stream) else stream
            init = None
            if warmup_periods > 0:
                head, s = split_stream(s, warmup_periods)
                init = run_simulation(head, warehouse, policy, seed).end_state
            result = run_simulation(s, warehouse, policy, seed, initial_state=init)
            pooled[name].append(result.placement_percentiles)
            rows.append(
                {
                    "policy": name,
                    "seed": seed,
                    "total_cost": result.total_cost,
                    "travel_cost": result.travel_cost,
                    "mean_percentile": result.mean_percentile,
                    "median_percentile": result.median_percentile,
                    "overflow_events": result.overflow_events,
                    "placements": len(result.placements),
                }
            )

    aggregates = {}
    histograms = {}
    for name, _ in policies:
        sub = [r for r in rows if r["policy"] == name]
        values = np.concatenate(pooled[name]) if pooled[name] else np.zeros(0)
        aggregates[name] = {
            "mean_percentile": float(np.mean([r["mean_percentile"] for r in sub])),
            "median_percentile": float(np.median(values)) if values.size else 0.0,
            "mean_total_cost": float(np.mean([r["total_cost"] for r in sub])),
            "mean_travel_cost": float(np.mean([r["travel_cost"] for r in sub])),
            "overflow_events": int(sum(r["overflow_events"] for r in sub)),
            "seeds": len(sub),
        }
        counts, edges = np.histogram(values, bins=histogram_bins, range=(0.0, 1.0))
        histograms[name] = (edges, counts)
    return ComparisonResult(rows=rows, aggregates=aggregates, histograms=histograms)
