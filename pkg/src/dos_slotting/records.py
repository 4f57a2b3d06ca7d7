"""Warehousing records: data model, CSV ingestion, shipment grouping,
chronological splitting, and synthetic record generation.

Input format (UTF-8, comma-separated, header row): arrival_date (ISO-8601),
warehouse_id, customer_type, product_group, pallet_weight, inbound_location,
outbound_location, description, dos_days, and an optional shipment_id. When
shipment_id is absent it is synthesized from
(arrival_date, warehouse_id, product_group, description, inbound_location),
since identical pallets of one shipment arrive together and share all of
those fields.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

NULL_TOKEN = ""
N_DESCRIPTION_TOKENS = 5

RECORD_COLUMNS = [
    "arrival_date",
    "warehouse_id",
    "customer_type",
    "product_group",
    "pallet_weight",
    "inbound_location",
    "outbound_location",
    "description",
    "dos_days",
    "shipment_id",
]


class SchemaError(ValueError):
    """Header is missing required columns or otherwise malformed."""


class GroupingError(ValueError):
    """Records sharing a shipment_id disagree on shipment features."""


class ConfigurationError(ValueError):
    """Invalid split windows or generator configuration."""


@dataclass(frozen=True)
class RowError:
    line: int  # 1-based file line (header is line 1)
    reason: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.reason}"


@dataclass(frozen=True)
class PalletRecord:
    arrival_date: dt.date
    warehouse_id: str
    customer_type: str
    product_group: str
    pallet_weight: float
    inbound_location: str
    outbound_location: str
    description: str
    dos_days: int
    shipment_id: str

    @property
    def exit_date(self) -> dt.date:
        """First day the pallet is no longer resident."""
        return self.arrival_date + dt.timedelta(days=self.dos_days)


def tokenize_description(text: str) -> tuple[str, ...]:
    """Lowercase, split on whitespace, first 5 tokens, null-padded.

    Token order is preserved: abbreviations mean different things depending
    on word position, so this must stay order-sensitive.
    """
    tokens = text.lower().split()[:N_DESCRIPTION_TOKENS]
    return tuple(tokens) + (NULL_TOKEN,) * (N_DESCRIPTION_TOKENS - len(tokens))


def synthesize_shipment_id(record_fields: dict) -> str:
    parts = (
        record_fields["arrival_date"],
        record_fields["warehouse_id"],
        record_fields["product_group"],
        record_fields["description"],
        record_fields["inbound_location"],
    )
    return "AUTO-" + "/".join(str(p) for p in parts)


@dataclass(frozen=True)
class ShipmentFeatures:
    """The shipment-level covariates known on arrival."""

    shipment_id: str
    arrival_date: dt.date
    warehouse_id: str
    customer_type: str
    product_group: str
    pallet_weight: float
    inbound_location: str
    outbound_location: str
    description: str
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.tokens:
            object.__setattr__(self, "tokens", tokenize_description(self.description))


@dataclass(frozen=True)
class Shipment:
    features: ShipmentFeatures
    pallet_dos: tuple[int, ...]

    def __post_init__(self):
        if len(self.pallet_dos) < 1:
            raise ValueError("shipment must contain at least one pallet")

    @property
    def size(self) -> int:
        return len(self.pallet_dos)

    @property
    def arrival_date(self) -> dt.date:
        return self.features.arrival_date

    @property
    def exit_date(self) -> dt.date:
        """Day after the last pallet leaves."""
        return self.arrival_date + dt.timedelta(days=max(self.pallet_dos))


@dataclass
class DatasetSplit:
    train: list[Shipment]
    test: list[Shipment]
    extended_test: list[Shipment]
    dropped: int = 0


@dataclass
class ParseResult:
    records: list[PalletRecord]
    errors: list[RowError]


def _parse_row(raw: dict[str, str]) -> PalletRecord:
    try:
        arrival = dt.date.fromisoformat(raw["arrival_date"].strip())
    except ValueError as exc:
        raise ValueError(f"bad arrival_date {raw['arrival_date']!r}: {exc}") from None
    try:
        weight = float(raw["pallet_weight"])
    except ValueError:
        raise ValueError(f"bad pallet_weight {raw['pallet_weight']!r}") from None
    if not math.isfinite(weight) or weight < 0:
        raise ValueError(f"pallet_weight must be finite and >= 0, got {weight}")
    try:
        dos = int(raw["dos_days"])
    except ValueError:
        raise ValueError(f"bad dos_days {raw['dos_days']!r}") from None
    if dos < 1:
        raise ValueError(f"dos_days must be >= 1, got {dos}")

    fields = {
        "arrival_date": arrival,
        "warehouse_id": raw["warehouse_id"].strip(),
        "customer_type": raw["customer_type"].strip(),
        "product_group": raw["product_group"].strip(),
        "pallet_weight": weight,
        "inbound_location": raw["inbound_location"].strip(),
        "outbound_location": raw["outbound_location"].strip(),
        "description": raw["description"],
        "dos_days": dos,
    }
    shipment_id = (raw.get("shipment_id") or "").strip()
    if not shipment_id:
        shipment_id = synthesize_shipment_id(fields)
    return PalletRecord(shipment_id=shipment_id, **fields)


def parse_records(source: IO[str] | str, schema: dict[str, str] | None = None) -> ParseResult:
    """Parse delimited records, collecting row errors instead of aborting.

    Parameters
    ----------
    source : text stream or string
        CSV content with a header row.
    schema : optional mapping
        canonical column name -> actual column name in the file.

    Raises
    ------
    SchemaError
        If a required column is absent from the header.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    header = reader.fieldnames
    if header is None:
        raise SchemaError("empty input: no header row")
    mapping = {name: name for name in RECORD_COLUMNS}
    if schema:
        mapping.update(schema)
    required = [c for c in RECORD_COLUMNS if c != "shipment_id"]
    missing = [mapping[c] for c in required if mapping[c] not in header]
    if missing:
        raise SchemaError(f"missing columns: {', '.join(sorted(missing))}")
    has_shipment_id = mapping["shipment_id"] in header

    records: list[PalletRecord] = []
    errors: list[RowError] = []
    for line, row in enumerate(reader, start=2):
        raw = {c: row.get(mapping[c]) for c in required}
        if any(v is None for v in raw.values()):
            errors.append(RowError(line, "short row"))
            continue
        raw["shipment_id"] = row.get(mapping["shipment_id"]) if has_shipment_id else ""
        try:
            records.append(_parse_row(raw))
        except ValueError as exc:
            errors.append(RowError(line, str(exc)))
    return ParseResult(records=records, errors=errors)


def serialize_records(records: Iterable[PalletRecord], dest: IO[str]) -> None:
    """Write records in the input CSV format (round-trips through parse)."""
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.arrival_date.isoformat(),
                r.warehouse_id,
                r.customer_type,
                r.product_group,
                repr(r.pallet_weight),
                r.inbound_location,
                r.outbound_location,
                r.description,
                r.dos_days,
                r.shipment_id,
            ]
        )


def _features_of(record: PalletRecord) -> ShipmentFeatures:
    return ShipmentFeatures(
        shipment_id=record.shipment_id,
        arrival_date=record.arrival_date,
        warehouse_id=record.warehouse_id,
        customer_type=record.customer_type,
        product_group=record.product_group,
        pallet_weight=record.pallet_weight,
        inbound_location=record.inbound_location,
        outbound_location=record.outbound_location,
        description=record.description,
    )


_FEATURE_FIELDS = (
    "arrival_date",
    "warehouse_id",
    "customer_type",
    "product_group",
    "pallet_weight",
    "inbound_location",
    "outbound_location",
    "description",
)


def group_shipments(records: Sequence[PalletRecord]) -> list[Shipment]:
    """Group pallet records into shipments by shipment_id.

    All pallets of one shipment must agree on every feature field; a
    conflict raises GroupingError naming the offending id.
    """
    if not records:
        raise ValueError("no records to group")
    by_id: dict[str, list[PalletRecord]] = {}
    order: list[str] = []
    for r in records:
        if r.shipment_id not in by_id:
            by_id[r.shipment_id] = []
            order.append(r.shipment_id)
        by_id[r.shipment_id].append(r)

    shipments = []
    for sid in order:
        members = by_id[sid]
        first = members[0]
        for other in members[1:]:
            for name in _FEATURE_FIELDS:
                if getattr(other, name) != getattr(first, name):
                    raise GroupingError(
                        f"shipment {sid!r}: conflicting {name} "
                        f"({getattr(first, name)!r} vs {getattr(other, name)!r})"
                    )
        shipments.append(
            Shipment(
                features=_features_of(first),
                pallet_dos=tuple(m.dos_days for m in members),
            )
        )
    return shipments


def split_dataset(
    shipments: Sequence[Shipment],
    train_exit_cutoff: dt.date,
    test_window: tuple[dt.date, dt.date],
    extended_window: tuple[dt.date, dt.date],
) -> DatasetSplit:
    """Chronological train/test/extended-test split.

    train: shipments whose last pallet exited strictly before the cutoff.
    test/extended: arrival strictly after the window start and exit strictly
    before the window end. Shipments matching no rule are dropped (counted).
    """
    t_start, t_end = test_window
    e_start, e_end = extended_window
    if not (t_start < t_end and e_start < e_end):
        raise ConfigurationError("windows must have start < end")
    if t_start < train_exit_cutoff:
        raise ConfigurationError("test window overlaps the training cutoff")
    if e_start < t_end:
        raise ConfigurationError("extended window overlaps the test window")

    split = DatasetSplit(train=[], test=[], extended_test=[])
    for s in shipments:
        if s.exit_date < train_exit_cutoff:
            split.train.append(s)
        elif s.arrival_date > t_start and s.exit_date < t_end:
            split.test.append(s)
        elif s.arrival_date > e_start and s.exit_date < e_end:
            split.extended_test.append(s)
        else:
            split.dropped += 1
    return split


# --- synthetic records ---------------------------------------------------


@dataclass(frozen=True)
class DosSpec:
    """Per-group stay-length distribution: 'lognormal' or 'constant'."""

    kind: str
    mu: float = 0.0
    sigma: float = 0.0
    value: int = 1

    def __post_init__(self):
        if self.kind not in ("lognormal", "constant"):
            raise ConfigurationError(f"unknown DoS distribution {self.kind!r}")
        if self.kind == "constant" and self.value < 1:
            raise ConfigurationError("constant DoS must be >= 1")


@dataclass(frozen=True)
class GroupSpec:
    name: str
    dos: DosSpec
    weight: float = 1.0
    description_words: tuple[str, ...] = ("frozen", "goods", "pallet")


@dataclass(frozen=True)
class GeneratorConfig:
    groups: tuple[GroupSpec, ...]
    start: dt.date
    end: dt.date  # exclusive
    shipments_per_day: int = 10
    mean_shipment_size: float = 10.6
    customer_types: tuple[str, ...] = ("retail", "wholesale", "export")
    warehouse_ids: tuple[str, ...] = ("W01",)
    inbound_locations: tuple[str, ...] = ("plant-a", "plant-b", "port")
    outbound_locations: tuple[str, ...] = ("dc-east", "dc-west", "store")
    drift_mu_per_year: float = 0.0

    def __post_init__(self):
        if not self.groups:
            raise ConfigurationError("at least one product group required")
        if self.end <= self.start:
            raise ConfigurationError("empty date range")
        if self.mean_shipment_size < 1:
            raise ConfigurationError("mean shipment size must be >= 1")


def _draw_dos(spec: DosSpec, mu_shift: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "constant":
        return np.full(size, spec.value, dtype=np.int64)
    draws = np.exp(rng.normal(spec.mu + mu_shift, spec.sigma, size))
    return np.maximum(1, np.rint(draws)).astype(np.int64)


def synthesize_records(config: GeneratorConfig, seed: int) -> list[PalletRecord]:
    """Generate records satisfying all PalletRecord invariants.

    Pure function of (config, seed): the same inputs produce byte-identical
    CSV output through serialize_records.
    """
    rng = np.random.default_rng(seed)
    group_weights = np.array([g.weight for g in config.groups], dtype=np.float64)
    group_weights = group_weights / group_weights.sum()

    records: list[PalletRecord] = []
    n_days = (config.end - config.start).days
    shipment_no = 0
    for day in range(n_days):
        arrival = config.start + dt.timedelta(days=day)
        mu_shift = config.drift_mu_per_year * (day / 365.0)
        for _ in range(config.shipments_per_day):
            shipment_no += 1
            group = config.groups[int(rng.choice(len(config.groups), p=group_weights))]
            size = 1 + int(rng.poisson(config.mean_shipment_size - 1.0))
            n_words = int(rng.integers(2, N_DESCRIPTION_TOKENS + 1))
            words = rng.choice(group.description_words, size=n_words, replace=True)
            features = {
                "arrival_date": arrival,
                "warehouse_id": str(rng.choice(config.warehouse_ids)),
                "customer_type": str(rng.choice(config.customer_types)),
                "product_group": group.name,
                "pallet_weight": round(float(rng.uniform(50.0, 950.0)), 1),
                "inbound_location": str(rng.choice(config.inbound_locations)),
                "outbound_location": str(rng.choice(config.outbound_locations)),
                "description": " ".join(words),
            }
            dos_values = _draw_dos(group.dos, mu_shift, size, rng)
            sid = f"S{shipment_no:06d}"
            for d in dos_values:
                records.append(PalletRecord(dos_days=int(d), shipment_id=sid, **features))
    return records
