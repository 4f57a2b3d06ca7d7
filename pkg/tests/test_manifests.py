import datetime as dt
import io

import numpy as np
import pytest

from dos_slotting.manifests import read_manifest, target_quantiles, write_manifest
from dos_slotting.records import (
    group_shipments,
    synthesize_records,
)

from conftest import benchmark_generator_config


@pytest.fixture(scope="module")
def shipments():
    return group_shipments(synthesize_records(benchmark_generator_config(), 3))[:120]


def test_roundtrip_preserves_shipments_and_targets(shipments):
    buf = io.StringIO()
    write_manifest(shipments, buf)
    buf.seek(0)
    rows = read_manifest(buf)
    assert len(rows) == len(shipments)
    for row, original in zip(rows, shipments):
        assert row.shipment == original
        assert np.array_equal(row.target.q, target_quantiles(original).q)


def test_targets_are_the_realized_quantiles(shipments):
    s = shipments[0]
    target = target_quantiles(s)
    assert min(s.pallet_dos) <= target.q[0] <= target.q[18] <= max(s.pallet_dos)


def test_missing_columns_rejected():
    with pytest.raises(ValueError, match="missing columns"):
        read_manifest(io.StringIO("shipment_id,arrival_date\nS1,2017-01-01\n"))


def test_token_column_consistency_enforced(shipments):
    buf = io.StringIO()
    write_manifest(shipments[:1], buf)
    tampered = buf.getvalue().replace(
        "|".join(shipments[0].features.tokens), "zz|zz|zz|zz|zz"
    )
    with pytest.raises(ValueError, match="token column"):
        read_manifest(io.StringIO(tampered))
