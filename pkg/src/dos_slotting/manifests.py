"""Split manifests: the shipment-level interchange between ingestion,
predictors, evaluation, and the external model trainer.

One CSV row per shipment: the raw features, the tokenized description
(pipe-joined, padded to 5), the pallet stay lengths (pipe-joined), and the
19 target quantiles q05..q95 computed from the realized stays.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from typing import IO, Sequence

from dos_slotting.distribution import (
    LEVELS,
    QuantileVector,
    empirical_cdf,
    quantile_vector,
)
from dos_slotting.records import Shipment, ShipmentFeatures

_QUANTILE_COLUMNS = [f"q{int(round(l * 100)):02d}" for l in LEVELS]

MANIFEST_COLUMNS = [
    "shipment_id",
    "arrival_date",
    "warehouse_id",
    "customer_type",
    "product_group",
    "pallet_weight",
    "inbound_location",
    "outbound_location",
    "description",
    "tokens",
    "pallet_count",
    "dos_days",
] + _QUANTILE_COLUMNS


@dataclass(frozen=True)
class ManifestRow:
    shipment: Shipment
    target: QuantileVector


def target_quantiles(shipment: Shipment) -> QuantileVector:
    return quantile_vector(empirical_cdf(shipment.pallet_dos))


def write_manifest(shipments: Sequence[Shipment], dest: IO[str]) -> None:
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(MANIFEST_COLUMNS)
    for s in shipments:
        f = s.features
        target = target_quantiles(s)
        writer.writerow(
            [
                f.shipment_id,
                f.arrival_date.isoformat(),
                f.warehouse_id,
                f.customer_type,
                f.product_group,
                repr(f.pallet_weight),
                f.inbound_location,
                f.outbound_location,
                f.description,
                "|".join(f.tokens),
                s.size,
                "|".join(str(d) for d in s.pallet_dos),
            ]
            + [repr(float(v)) for v in target.q]
        )


def read_manifest(source: IO[str]) -> list[ManifestRow]:
    reader = csv.DictReader(source)
    if reader.fieldnames is None or not set(MANIFEST_COLUMNS).issubset(reader.fieldnames):
        missing = sorted(set(MANIFEST_COLUMNS) - set(reader.fieldnames or []))
        raise ValueError(f"manifest missing columns: {', '.join(missing)}")
    rows = []
    for raw in reader:
        features = ShipmentFeatures(
            shipment_id=raw["shipment_id"],
            arrival_date=dt.date.fromisoformat(raw["arrival_date"]),
            warehouse_id=raw["warehouse_id"],
            customer_type=raw["customer_type"],
            product_group=raw["product_group"],
            pallet_weight=float(raw["pallet_weight"]),
            inbound_location=raw["inbound_location"],
            outbound_location=raw["outbound_location"],
            description=raw["description"],
        )
        dos = tuple(int(tok) for tok in raw["dos_days"].split("|"))
        if len(dos) != int(raw["pallet_count"]):
            raise ValueError(f"shipment {features.shipment_id}: pallet count mismatch")
        if tuple(raw["tokens"].split("|")) != features.tokens:
            raise ValueError(f"shipment {features.shipment_id}: token column mismatch")
        target = QuantileVector.parse(",".join(raw[c] for c in _QUANTILE_COLUMNS))
        rows.append(ManifestRow(shipment=Shipment(features=features, pallet_dos=dos), target=target))
    return rows
