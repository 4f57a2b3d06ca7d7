import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dos_slotting.distribution import QuantileVector, empirical_cdf, quantile_vector
from dos_slotting.metrics import (
    ape,
    evaluate_pairs,
    mape,
    msle_loss,
    placement_percentile,
)

LN2_SQ = math.log(2.0) ** 2  # (ln 2 - ln 4)^2, the all-1 vs all-3 constant case


def qv_of(values):
    return QuantileVector(np.asarray(values, dtype=float))


monotone_vectors = st.lists(
    st.floats(min_value=0.0, max_value=500.0, allow_nan=False), min_size=19, max_size=19
).map(lambda vs: qv_of(np.sort(vs)))


class TestMsle:
    def test_identity(self):
        qv = quantile_vector(empirical_cdf([3, 8, 8, 40]))
        assert msle_loss(qv, qv) == 0.0

    def test_constant_term_case(self):
        actual = QuantileVector.constant(1.0)
        predicted = QuantileVector.constant(3.0)
        assert msle_loss(actual, predicted) == pytest.approx(LN2_SQ, abs=1e-12)
        assert msle_loss(actual, predicted) == pytest.approx(0.48045, abs=1e-5)

    def test_matches_per_term_oracle(self):
        a = qv_of(range(1, 20))
        b = qv_of([2 * v + 1 for v in range(19)])
        terms = [
            (math.log(av + 1) - math.log(bv + 1)) ** 2 for av, bv in zip(a.q, b.q)
        ]
        assert msle_loss(a, b) == pytest.approx(sum(terms) / 19, abs=1e-12)

    @given(monotone_vectors, monotone_vectors)
    @settings(max_examples=50, deadline=None)
    def test_symmetric_and_nonnegative(self, a, b):
        assert msle_loss(a, b) == pytest.approx(msle_loss(b, a), abs=1e-12)
        assert msle_loss(a, b) >= 0.0


class TestApe:
    def test_direct(self):
        assert ape(12.9, 10.0) == pytest.approx(0.29)

    def test_exact(self):
        assert ape(5.0, 5.0) == 0.0

    def test_zero_prediction(self):
        assert ape(0.0, 4.0) == 1.0

    def test_zero_actual_rejected(self):
        with pytest.raises(ValueError):
            ape(3.0, 0.0)


class TestMape:
    def test_odd_count_median(self):
        pairs = [
            (QuantileVector.constant(11.0), QuantileVector.constant(10.0)),  # ape 0.1
            (QuantileVector.constant(12.0), QuantileVector.constant(10.0)),  # ape 0.2
            (QuantileVector.constant(13.0), QuantileVector.constant(10.0)),  # ape 0.3
        ]
        assert mape(pairs) == pytest.approx(0.2)

    def test_exact_predictions(self):
        qv = quantile_vector(empirical_cdf([1, 5, 5, 12]))
        assert mape([(qv, qv)]) == 0.0

    def test_order_invariant(self):
        pairs = [
            (QuantileVector.constant(p), QuantileVector.constant(a))
            for p, a in [(11, 10), (15, 10), (30, 20), (5, 20)]
        ]
        assert mape(pairs) == mape(list(reversed(pairs)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mape([])

    def test_even_count_median_is_central_mean(self):
        pairs = [
            (QuantileVector.constant(11.0), QuantileVector.constant(10.0)),  # 0.1
            (QuantileVector.constant(13.0), QuantileVector.constant(10.0)),  # 0.3
        ]
        assert mape(pairs) == pytest.approx(0.2)


class TestPlacementPercentile:
    def test_fortieth(self):
        assert placement_percentile(40, 100) == pytest.approx(0.40)

    def test_single_location(self):
        assert placement_percentile(1, 1) == 1.0

    def test_mean_over_all_ranks(self):
        for n in (1, 2, 7, 100):
            mean = np.mean([placement_percentile(r, n) for r in range(1, n + 1)])
            assert mean == pytest.approx((n + 1) / (2 * n))

    def test_strictly_monotone(self):
        values = [placement_percentile(r, 50) for r in range(1, 51)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            placement_percentile(0, 10)
        with pytest.raises(ValueError):
            placement_percentile(11, 10)


class TestEvaluatePairs:
    def test_oracle_report_is_zero(self):
        qvs = [quantile_vector(empirical_cdf([d, d + 1, d + 5])) for d in (1, 3, 9)]
        report = evaluate_pairs([(qv, qv) for qv in qvs])
        assert report.msle == 0.0
        assert report.mape == 0.0
        assert report.n_shipments == 3
        assert len(report.per_percentile_mape) == 19
        assert all(v == 0.0 for v in report.per_percentile_mape)

    def test_json_keys(self):
        import json

        qv = QuantileVector.constant(4.0)
        payload = json.loads(evaluate_pairs([(qv, qv)]).to_json())
        assert set(payload) == {"msle", "mape", "n_shipments", "per_percentile_mape"}
        assert len(payload["per_percentile_mape"]) == 19
