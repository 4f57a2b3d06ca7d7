"""Prediction-quality and placement metrics.

MSLE is computed with the natural logarithm; MAPE is the median of the
pooled APE multiset over all 19 percentiles and all shipments, with the
even-count median taken as the mean of the two central order statistics.
APE entries with a zero actual are excluded from pooling (stay lengths are
>= 1 in valid data, so those only arise from bad input).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dos_slotting.distribution import N_LEVELS, QuantileVector

__all__ = [
    "msle_loss",
    "ape",
    "mape",
    "placement_percentile",
    "EvaluationReport",
    "evaluate_pairs",
]


def msle_loss(actual: QuantileVector, predicted: QuantileVector) -> float:
    """Mean squared logarithmic error across the 19 percentile points."""
    a, p = actual.q, predicted.q
    if np.any(a < 0) or np.any(p < 0):
        raise ValueError("quantiles must be nonnegative")
    return float(np.mean((np.log1p(a) - np.log1p(p)) ** 2))


def ape(predicted_days: float, actual_days: float) -> float:
    """Absolute percentage error |predicted - actual| / actual."""
    if actual_days <= 0:
        raise ValueError("actual stay length must be positive")
    return abs(predicted_days - actual_days) / actual_days


def _ape_pool(pairs) -> np.ndarray:
    rows = []
    for predicted, actual in pairs:
        a, p = actual.q, predicted.q
        valid = a > 0
        rows.append(np.abs(p[valid] - a[valid]) / a[valid])
    return np.concatenate(rows) if rows else np.zeros(0)


def mape(pairs: Sequence[tuple[QuantileVector, QuantileVector]]) -> float:
    """Median APE pooled over every percentile of every (predicted, actual) pair."""
    if len(pairs) == 0:
        raise ValueError("mape requires at least one pair")
    pool = _ape_pool(pairs)
    if pool.size == 0:
        raise ValueError("no valid APE entries (all actuals were zero)")
    return float(np.median(pool))


def placement_percentile(location_rank: int, capacity: int) -> float:
    """rank / N, with locations ranked by travel time ascending."""
    if not 1 <= location_rank <= capacity:
        raise ValueError(f"rank {location_rank} outside [1, {capacity}]")
    return location_rank / capacity


@dataclass(frozen=True)
class EvaluationReport:
    msle: float
    mape: float
    n_shipments: int
    per_percentile_mape: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "msle": self.msle,
                "mape": self.mape,
                "n_shipments": self.n_shipments,
                "per_percentile_mape": list(self.per_percentile_mape),
            },
            sort_keys=True,
        )


def evaluate_pairs(
    pairs: Sequence[tuple[QuantileVector, QuantileVector]],
) -> EvaluationReport:
    """Aggregate report over (predicted, actual) quantile-vector pairs.

    msle is the mean per-shipment MSLE; mape pools all percentiles; the
    per-percentile entries are median APEs at each of the 19 levels.
    """
    if len(pairs) == 0:
        raise ValueError("nothing to evaluate")
    msle = float(np.mean([msle_loss(a, p) for p, a in pairs]))
    predicted = np.stack([p.q for p, _ in pairs])
    actual = np.stack([a.q for _, a in pairs])
    with np.errstate(divide="ignore", invalid="ignore"):
        apes = np.abs(predicted - actual) / actual
    apes = np.ma.masked_invalid(np.where(actual > 0, apes, np.nan))
    per_level = tuple(float(np.ma.median(apes[:, i])) for i in range(N_LEVELS))
    return EvaluationReport(
        msle=msle,
        mape=mape(pairs),
        n_shipments=len(pairs),
        per_percentile_mape=per_level,
    )
