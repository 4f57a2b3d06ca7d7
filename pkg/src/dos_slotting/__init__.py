"""Duration-of-stay driven warehouse storage assignment.

Distributional stay-length estimation, a size-debiased warehouse
distribution, the stay-ordered placement rule, baseline policies, and a
discrete-time simulator for comparing them.
"""

from dos_slotting.distribution import (
    EmpiricalCdf,
    QuantileVector,
    WarehouseDosDistribution,
    debias_warehouse_distribution,
    empirical_cdf,
    quantile_vector,
    sample_dos,
)
from dos_slotting.metrics import ape, evaluate_pairs, mape, msle_loss, placement_percentile
from dos_slotting.records import (
    PalletRecord,
    Shipment,
    ShipmentFeatures,
    group_shipments,
    parse_records,
    split_dataset,
    synthesize_records,
)
from dos_slotting.warehouse import OccupancyState, Warehouse, assign, target_location

__version__ = "0.1.0"

__all__ = [
    "EmpiricalCdf",
    "QuantileVector",
    "WarehouseDosDistribution",
    "debias_warehouse_distribution",
    "empirical_cdf",
    "quantile_vector",
    "sample_dos",
    "ape",
    "evaluate_pairs",
    "mape",
    "msle_loss",
    "placement_percentile",
    "PalletRecord",
    "Shipment",
    "ShipmentFeatures",
    "group_shipments",
    "parse_records",
    "split_dataset",
    "synthesize_records",
    "OccupancyState",
    "Warehouse",
    "assign",
    "target_location",
    "__version__",
]
