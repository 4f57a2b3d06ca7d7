"""Shipment-level stay-length predictors.

Every predictor maps ShipmentFeatures to a QuantileVector. Four kinds are
provided: an oracle (the shipment's own realized quantiles), a hierarchical
group-quantile model, a constant predictor, and an external predictor backed
by a prediction interchange file.

Interchange format: UTF-8 CSV, header ``shipment_id,q05,q10,...,q95``, one
row per shipment with 19 stay-length values at levels 0.05..0.95.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Protocol, Sequence

import numpy as np

from dos_slotting.distribution import (
    LEVELS,
    N_LEVELS,
    QuantileVector,
    empirical_cdf,
    quantile_vector,
)
from dos_slotting.records import Shipment, ShipmentFeatures

INTERCHANGE_COLUMNS = ["shipment_id"] + [f"q{int(round(l * 100)):02d}" for l in LEVELS]
INTERCHANGE_HEADER = ",".join(INTERCHANGE_COLUMNS)

__all__ = [
    "QuantilePredictor",
    "ConstantPredictor",
    "GroupQuantileModel",
    "fit_group_model",
    "OraclePredictor",
    "ExternalPredictor",
    "PredictionLookupError",
    "PredictionFileError",
    "LoadReport",
    "load_predictions",
    "write_predictions",
    "save_group_model",
    "load_group_model",
    "DEFAULT_HIERARCHY",
    "INTERCHANGE_HEADER",
]


class PredictionLookupError(KeyError):
    """A predictor has no entry for the requested shipment."""


class PredictionFileError(ValueError):
    """A prediction interchange file is malformed."""


class QuantilePredictor(Protocol):
    def predict(self, features: ShipmentFeatures) -> QuantileVector: ...


@dataclass(frozen=True)
class ConstantPredictor:
    vector: QuantileVector

    def predict(self, features: ShipmentFeatures) -> QuantileVector:
        return self.vector


def _month_key(features: ShipmentFeatures) -> str:
    return f"{features.arrival_date.month:02d}"


_KEY_EXTRACTORS = {
    "product_group": lambda f: f.product_group,
    "customer_type": lambda f: f.customer_type,
    "warehouse_id": lambda f: f.warehouse_id,
    "arrival_month": _month_key,
}

# most to least specific; month rather than exact date so seasonal patterns
# pool enough shipments to be estimable
DEFAULT_HIERARCHY: tuple[tuple[str, ...], ...] = (
    ("product_group", "customer_type", "arrival_month"),
    ("product_group", "arrival_month"),
    ("product_group",),
    (),
)


def _key_for(level: tuple[str, ...], features: ShipmentFeatures) -> tuple[str, ...]:
    return tuple(_KEY_EXTRACTORS[name](features) for name in level)


@dataclass(frozen=True)
class GroupQuantileModel:
    """Nonparametric predictor: pooled empirical quantiles per feature key.

    Walks its key hierarchy from most to least specific and returns the
    first stored vector; the global pool (empty key) is always present.
    """

    hierarchy: tuple[tuple[str, ...], ...]
    tables: tuple[dict[tuple[str, ...], QuantileVector], ...]
    min_support: int

    def predict(self, features: ShipmentFeatures) -> QuantileVector:
        for level, table in zip(self.hierarchy, self.tables):
            hit = table.get(_key_for(level, features))
            if hit is not None:
                return hit
        raise AssertionError("global fallback missing")  # unreachable after fit


def fit_group_model(
    train: Sequence[Shipment],
    hierarchy: tuple[tuple[str, ...], ...] = DEFAULT_HIERARCHY,
    min_support: int = 20,
) -> GroupQuantileModel:
    """Fit pooled quantile tables at every hierarchy level.

    A key's vector is stored only when its pool holds at least
    ``min_support`` pallets; the global pool is always stored regardless.
    """
    if not train:
        raise ValueError("cannot fit on an empty training set")
    levels = tuple(tuple(level) for level in hierarchy)
    if levels[-1] != ():
        levels = levels + ((),)
    for level in levels:
        for name in level:
            if name not in _KEY_EXTRACTORS:
                raise ValueError(f"unknown feature key {name!r}")

    tables = []
    for level in levels:
        pools: dict[tuple[str, ...], list[int]] = {}
        for shipment in train:
            key = _key_for(level, shipment.features)
            pools.setdefault(key, []).extend(shipment.pallet_dos)
        table = {
            key: quantile_vector(empirical_cdf(dos))
            for key, dos in pools.items()
            if len(dos) >= min_support or level == ()
        }
        tables.append(table)
    return GroupQuantileModel(hierarchy=levels, tables=tuple(tables), min_support=min_support)


class OraclePredictor:
    """Returns each shipment's own realized stay-length quantiles."""

    def __init__(self, table: dict[str, QuantileVector]):
        self._table = table

    @classmethod
    def from_shipments(cls, shipments: Iterable[Shipment]) -> "OraclePredictor":
        return cls(
            {
                s.features.shipment_id: quantile_vector(empirical_cdf(s.pallet_dos))
                for s in shipments
            }
        )

    def predict(self, features: ShipmentFeatures) -> QuantileVector:
        try:
            return self._table[features.shipment_id]
        except KeyError:
            raise PredictionLookupError(features.shipment_id) from None


@dataclass(frozen=True)
class LoadReport:
    n_rows: int
    repaired: tuple[tuple[int, str], ...]  # (line, shipment_id) of repaired rows


class ExternalPredictor:
    """Predictions loaded from an interchange file, keyed by shipment_id."""

    def __init__(self, table: dict[str, QuantileVector], report: LoadReport):
        self._table = table
        self.report = report

    def predict(self, features: ShipmentFeatures) -> QuantileVector:
        try:
            return self._table[features.shipment_id]
        except KeyError:
            raise PredictionLookupError(features.shipment_id) from None

    def __contains__(self, shipment_id: str) -> bool:
        return shipment_id in self._table


def load_predictions(source: IO[str]) -> ExternalPredictor:
    """Load an interchange file.

    Non-monotone rows are repaired by running maximum and flagged in the
    load report; structurally bad rows raise PredictionFileError with the
    offending line number.
    """
    header = source.readline().strip()
    if header.split(",") != INTERCHANGE_COLUMNS:
        raise PredictionFileError(f"bad header: {header!r}")
    table: dict[str, QuantileVector] = {}
    repaired: list[tuple[int, str]] = []
    for line_no, line in enumerate(source, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != N_LEVELS + 1:
            raise PredictionFileError(
                f"line {line_no}: expected {N_LEVELS + 1} fields, got {len(parts)}"
            )
        sid = parts[0]
        try:
            values = np.array([float(tok) for tok in parts[1:]])
        except ValueError as exc:
            raise PredictionFileError(f"line {line_no}: {exc}") from None
        if np.any(values < 0):
            raise PredictionFileError(f"line {line_no}: negative quantile")
        monotone = np.maximum.accumulate(values)
        if np.any(monotone != values):
            repaired.append((line_no, sid))
            values = monotone
        table[sid] = QuantileVector(values)
    return ExternalPredictor(table, LoadReport(n_rows=len(table), repaired=tuple(repaired)))


def write_predictions(rows: Iterable[tuple[str, QuantileVector]], dest: IO[str]) -> None:
    dest.write(INTERCHANGE_HEADER + "\n")
    for sid, qv in rows:
        dest.write(f"{sid},{qv.serialize()}\n")


def save_group_model(model: GroupQuantileModel, dest: IO[str]) -> None:
    import json

    payload = {
        "min_support": model.min_support,
        "hierarchy": [list(level) for level in model.hierarchy],
        "tables": [
            sorted([list(key), [float(v) for v in qv.q]] for key, qv in table.items())
            for table in model.tables
        ],
    }
    json.dump(payload, dest, sort_keys=True)


def load_group_model(source: IO[str]) -> GroupQuantileModel:
    import json

    payload = json.load(source)
    hierarchy = tuple(tuple(level) for level in payload["hierarchy"])
    tables = tuple(
        {tuple(key): QuantileVector(np.array(values)) for key, values in table}
        for table in payload["tables"]
    )
    return GroupQuantileModel(
        hierarchy=hierarchy, tables=tables, min_support=int(payload["min_support"])
    )
