"""Empirical duration-of-stay distributions.

Per-shipment empirical CDFs and their 19-point quantile representation,
the size-debiased warehouse-level DoS distribution with its occupancy
rate, and inverse-transform sampling of a predicted stay length.

Conventions (documented, see module docs in README):
- quantiles use the lower empirical quantile min{t : F(t) >= level};
- sampling interpolates linearly between quantile knots and clamps the
  tails to the extreme quantiles;
- debiasing weights each observed pallet by 1/DoS, since a pallet that
  stays p periods is observed with frequency proportional to p times its
  steady-state share.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

N_LEVELS = 19
LEVELS = np.arange(1, N_LEVELS + 1) / 20.0  # 0.05, 0.10, ..., 0.95
# guards float noise when comparing cumulative weights against the levels
_LEVEL_EPS = 1e-9

__all__ = [
    "LEVELS",
    "N_LEVELS",
    "EmpiricalCdf",
    "QuantileVector",
    "WarehouseDosDistribution",
    "empirical_cdf",
    "quantile_vector",
    "debias_warehouse_distribution",
    "warehouse_distribution_from_masses",
    "sample_dos",
    "occupancy_series",
]


@dataclass(frozen=True)
class EmpiricalCdf:
    """Step CDF over integer stay lengths: F(t) = (1/p) sum 1{T_i <= t}."""

    support: np.ndarray  # distinct values, strictly increasing
    cum_weights: np.ndarray  # strictly increasing, last entry 1.0

    def __post_init__(self):
        if self.support.size == 0:
            raise ValueError("empty support")
        if self.support.size != self.cum_weights.size:
            raise ValueError("support and cum_weights length mismatch")
        if np.any(np.diff(self.support) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(np.diff(self.cum_weights) <= 0):
            raise ValueError("cum_weights must be strictly increasing")
        if abs(float(self.cum_weights[-1]) - 1.0) > 1e-12:
            raise ValueError("final cumulative weight must be 1")

    def value_at(self, t: float) -> float:
        """F(t): fraction of mass at or below t."""
        idx = int(np.searchsorted(self.support, t, side="right"))
        return 0.0 if idx == 0 else float(self.cum_weights[idx - 1])


@dataclass(frozen=True)
class QuantileVector:
    """19 stay-length percentile points at levels 0.05, 0.10, ..., 0.95."""

    q: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.q, dtype=np.float64)
        if arr.shape != (N_LEVELS,):
            raise ValueError(f"expected {N_LEVELS} entries, got {arr.shape}")
        if arr[0] < 0:
            raise ValueError("quantiles must be nonnegative")
        if np.any(np.diff(arr) < 0):
            raise ValueError("quantiles must be non-decreasing")
        object.__setattr__(self, "q", arr)

    @classmethod
    def constant(cls, value: float) -> "QuantileVector":
        return cls(np.full(N_LEVELS, float(value)))

    def serialize(self) -> str:
        """One line of 19 comma-separated reals (interchange form)."""
        return ",".join(repr(float(v)) for v in self.q)

    @classmethod
    def parse(cls, line: str) -> "QuantileVector":
        return cls(np.array([float(tok) for tok in line.split(",")]))


def empirical_cdf(dos_samples: Sequence[int]) -> EmpiricalCdf:
    """Empirical CDF of a shipment's realized pallet stay lengths."""
    if len(dos_samples) == 0:
        raise ValueError("empirical_cdf requires at least one sample")
    values = np.asarray(dos_samples)
    if np.any(values < 1):
        raise ValueError("stay lengths must be >= 1")
    support, counts = np.unique(values, return_counts=True)
    cum = np.cumsum(counts) / values.size
    cum[-1] = 1.0  # exact, despite float division
    return EmpiricalCdf(support=support.astype(np.int64), cum_weights=cum)


def quantile_vector(cdf: EmpiricalCdf) -> QuantileVector:
    """Lower empirical quantiles of ``cdf`` at the 19 standard levels."""
    idx = np.searchsorted(cdf.cum_weights, LEVELS - _LEVEL_EPS, side="left")
    return QuantileVector(cdf.support[idx].astype(np.float64))


@dataclass(frozen=True)
class WarehouseDosDistribution:
    """Size-debiased warehouse-level DoS distribution.

    ``z`` holds the normalized steady-state mass per stay length;
    ``w_at`` evaluates the cumulative distribution W(t); ``r_hat`` is the
    historical average occupancy rate, clamped into (0, 1].
    """

    support: np.ndarray  # stay lengths carrying mass, strictly increasing
    z: np.ndarray  # normalized masses, same length
    r_hat: float
    cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.support.size == 0:
            raise ValueError("empty distribution")
        if not 0.0 < self.r_hat <= 1.0:
            raise ValueError("r_hat must lie in (0, 1]")
        cum = np.cumsum(self.z)
        if abs(float(cum[-1]) - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1")
        cum[-1] = 1.0
        object.__setattr__(self, "cum", cum)

    @property
    def max_dos(self) -> int:
        return int(self.support[-1])

    def w_at(self, t: float) -> float:
        """W(t): cumulative debiased mass at or below stay length t."""
        idx = int(np.searchsorted(self.support, t, side="right"))
        return 0.0 if idx == 0 else float(self.cum[idx - 1])

    def z_map(self) -> dict[int, float]:
        return {int(p): float(m) for p, m in zip(self.support, self.z)}


def _debias_masses(dos_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    support, counts = np.unique(dos_values, return_counts=True)
    weighted = counts / support  # each record of DoS p carries weight 1/p
    return support.astype(np.int64), weighted / weighted.sum()


def debias_warehouse_distribution(records, capacity: int) -> WarehouseDosDistribution:
    """Estimate the warehouse DoS distribution and occupancy from records.

    Parameters
    ----------
    records : sequence of PalletRecord
        Historical pallets; each contributes weight 1/dos_days.
    capacity : int
        Number of storage locations N, used for the occupancy rate.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    if len(records) == 0:
        raise ValueError("no records")
    dos = np.array([r.dos_days for r in records], dtype=np.int64)
    if np.any(dos < 1):
        raise ValueError("stay lengths must be >= 1")
    support, z = _debias_masses(dos)

    start = min(r.arrival_date for r in records)
    end = max(r.exit_date for r in records)
    series = occupancy_series(records, capacity, (start, end))
    r_hat = min(1.0, float(series.mean()))
    return WarehouseDosDistribution(support=support, z=z, r_hat=r_hat)


def warehouse_distribution_from_masses(
    masses: Mapping[int, float], capacity: int, r_hat: float | None = None
) -> WarehouseDosDistribution:
    """Build the distribution from known steady-state masses z_p.

    Used by the simulator, where the per-period arrival pattern determines
    z_p exactly; ``r_hat`` defaults to sum(z_p)/capacity.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    items = sorted((int(p), float(m)) for p, m in masses.items() if m > 0)
    if not items:
        raise ValueError("no mass")
    support = np.array([p for p, _ in items], dtype=np.int64)
    raw = np.array([m for _, m in items])
    if r_hat is None:
        r_hat = min(1.0, float(raw.sum()) / capacity)
    return WarehouseDosDistribution(support=support, z=raw / raw.sum(), r_hat=r_hat)


def sample_dos(qv: QuantileVector, rng: np.random.Generator) -> float:
    """Inverse-transform sample from the piecewise-linear quantile curve.

    Tails are clamped to the extreme quantiles; between knots the value is
    linearly interpolated, so the sample always lies in [q05, q95].
    """
    u = rng.random()
    return float(np.interp(u, LEVELS, qv.q))


def occupancy_series(
    records, capacity: int, window: tuple[dt.date, dt.date]
) -> np.ndarray:
    """Residents-per-day divided by capacity over [window start, window end).

    A pallet arriving on day a with stay d is resident on days a..a+d-1.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    start, end = window
    n_days = (end - start).days
    if n_days <= 0:
        return np.zeros(0)
    delta = np.zeros(n_days + 1)
    for r in records:
        a = (r.arrival_date - start).days
        b = a + r.dos_days  # exclusive
        a = max(a, 0)
        b = min(b, n_days)
        if a < b:
            delta[a] += 1.0
            delta[b] -= 1.0
    return np.cumsum(delta[:-1]) / capacity
