import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dos_slotting.distribution import (
    LEVELS,
    QuantileVector,
    debias_warehouse_distribution,
    empirical_cdf,
    occupancy_series,
    quantile_vector,
    sample_dos,
    warehouse_distribution_from_masses,
)
from dos_slotting.records import PalletRecord


def make_record(arrival=dt.date(2017, 1, 1), dos=1, group="chicken"):
    return PalletRecord(
        arrival_date=arrival,
        warehouse_id="W01",
        customer_type="retail",
        product_group=group,
        pallet_weight=100.0,
        inbound_location="plant-a",
        outbound_location="dc-east",
        description="frozen goods",
        dos_days=dos,
        shipment_id="S1",
    )


def lower_quantile(samples, level):
    """Independent oracle: enumerate F-hat and take the minimal t."""
    values = sorted(samples)
    n = len(values)
    for t in sorted(set(values)):
        if sum(1 for v in values if v <= t) / n >= level - 1e-12:
            return t
    return values[-1]


class TestEmpiricalCdf:
    def test_direct_count(self):
        cdf = empirical_cdf([1, 2, 3, 4])
        assert cdf.value_at(2) == 0.5

    def test_singleton(self):
        cdf = empirical_cdf([7])
        assert list(cdf.support) == [7]
        assert cdf.value_at(7) == 1.0
        assert cdf.value_at(6) == 0.0

    def test_ties_merge(self):
        # hand count: 1 -> 0.25, 5 -> 0.75, 9 -> 1.0
        cdf = empirical_cdf([5, 5, 1, 9])
        assert list(cdf.support) == [1, 5, 9]
        assert np.allclose(cdf.cum_weights, [0.25, 0.75, 1.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            empirical_cdf([])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            empirical_cdf([0, 1])


class TestQuantileVector:
    def test_uniform_1_to_20(self):
        qv = quantile_vector(empirical_cdf(list(range(1, 21))))
        assert qv.q[0] == 1  # level 0.05
        assert qv.q[9] == 10  # level 0.50
        assert qv.q[18] == 19  # level 0.95

    def test_matches_enumeration_oracle(self):
        samples = [1, 1, 2, 4, 4, 4, 9, 30, 30, 31]
        qv = quantile_vector(empirical_cdf(samples))
        expected = [lower_quantile(samples, lv) for lv in LEVELS]
        assert list(qv.q) == expected

    def test_constant_samples(self):
        qv = quantile_vector(empirical_cdf([3] * 10))
        assert np.all(qv.q == 3)

    def test_two_point(self):
        qv = quantile_vector(empirical_cdf([1, 100]))
        for lv, q in zip(LEVELS, qv.q):
            assert q == (1 if lv <= 0.5 else 100)

    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            QuantileVector(np.array([1.0] * 9 + [0.5] + [1.0] * 9))

    def test_serialize_parse_roundtrip(self):
        qv = quantile_vector(empirical_cdf([2, 3, 5, 7, 11]))
        again = QuantileVector.parse(qv.serialize())
        assert np.array_equal(qv.q, again.q)

    @given(st.lists(st.integers(min_value=1, max_value=400), min_size=1, max_size=60))
    @settings(max_examples=60, deadline=None)
    def test_monotone_and_in_range(self, samples):
        qv = quantile_vector(empirical_cdf(samples))
        assert np.all(np.diff(qv.q) >= 0)
        assert qv.q[0] >= min(samples)
        assert qv.q[18] <= max(samples)


class TestDebias:
    def test_hand_normalized_weights(self):
        # DoS [1,1,2,2]: weights 1,1,0.5,0.5 -> z=(2/3, 1/3), W(1)=2/3, W(2)=1
        recs = [make_record(dos=d) for d in (1, 1, 2, 2)]
        dist = debias_warehouse_distribution(recs, capacity=10)
        assert dist.w_at(1) == pytest.approx(2 / 3)
        assert dist.w_at(2) == pytest.approx(1.0)

    def test_single_atom_unaffected(self):
        for k in (1, 4, 9):
            recs = [make_record(dos=k) for _ in range(5)]
            dist = debias_warehouse_distribution(recs, capacity=50)
            assert dist.w_at(k - 1) == 0.0
            assert dist.w_at(k) == 1.0

    def test_recovers_known_masses_from_biased_sample(self):
        # observed frequency proportional to p * z_p for z = (0.5, 0.3, 0.2)
        z = np.array([0.5, 0.3, 0.2])
        p_values = np.array([1, 2, 3])
        biased = z * p_values
        biased = biased / biased.sum()
        rng = np.random.default_rng(42)
        draws = rng.choice(p_values, size=30_000, p=biased)
        recs = [make_record(dos=int(d)) for d in draws]
        dist = debias_warehouse_distribution(recs, capacity=10**6)
        recovered = dist.z_map()
        for p, z_true in zip(p_values, z):
            assert abs(recovered[int(p)] - z_true) < 0.02

    def test_duplication_invariance(self):
        recs = [make_record(dos=d) for d in (1, 2, 2, 5, 9)]
        once = debias_warehouse_distribution(recs, capacity=10)
        twice = debias_warehouse_distribution(recs + recs, capacity=10)
        assert np.allclose(once.z, twice.z, atol=1e-12)
        for t in range(0, 11):
            assert once.w_at(t) == pytest.approx(twice.w_at(t), abs=1e-12)

    def test_bad_capacity(self):
        with pytest.raises(ValueError):
            debias_warehouse_distribution([make_record()], capacity=0)

    def test_w_monotone_and_terminal(self):
        recs = [make_record(dos=d) for d in (1, 3, 3, 7, 20)]
        dist = debias_warehouse_distribution(recs, capacity=30)
        values = [dist.w_at(t) for t in range(0, 25)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-12)


class TestFromMasses:
    def test_normalization_and_r(self):
        dist = warehouse_distribution_from_masses({1: 1, 3: 3}, capacity=4)
        assert dist.w_at(1) == pytest.approx(0.25)
        assert dist.w_at(3) == pytest.approx(1.0)
        assert dist.r_hat == 1.0

    def test_r_clamped(self):
        dist = warehouse_distribution_from_masses({2: 10}, capacity=5)
        assert dist.r_hat == 1.0


class _FixedRng:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


class TestSampleDos:
    def test_degenerate(self):
        qv = QuantileVector.constant(7.0)
        rng = np.random.default_rng(0)
        assert all(sample_dos(qv, rng) == 7.0 for _ in range(20))

    def test_knot_point(self):
        qv = quantile_vector(empirical_cdf(list(range(1, 21))))
        assert sample_dos(qv, _FixedRng(0.5)) == qv.q[9]

    def test_tails_clamped(self):
        qv = quantile_vector(empirical_cdf(list(range(1, 21))))
        assert sample_dos(qv, _FixedRng(0.01)) == qv.q[0]
        assert sample_dos(qv, _FixedRng(0.999)) == qv.q[18]

    def test_monte_carlo_median(self):
        qv = quantile_vector(empirical_cdf(list(range(1, 21))))
        rng = np.random.default_rng(7)
        draws = np.array([sample_dos(qv, rng) for _ in range(100_000)])
        assert abs(np.median(draws) - 10) <= 1.0

    @given(st.lists(st.integers(min_value=1, max_value=99), min_size=1, max_size=30), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_bounded_by_extreme_quantiles(self, samples, seed):
        qv = quantile_vector(empirical_cdf(samples))
        rng = np.random.default_rng(seed)
        for _ in range(5):
            value = sample_dos(qv, rng)
            assert qv.q[0] <= value <= qv.q[18]


class TestOccupancySeries:
    def test_single_record(self):
        rec = make_record(arrival=dt.date(2017, 1, 5), dos=3)
        series = occupancy_series([rec], 3, (dt.date(2017, 1, 5), dt.date(2017, 1, 8)))
        assert np.allclose(series, [1 / 3, 1 / 3, 1 / 3])

    def test_no_records_in_window(self):
        rec = make_record(arrival=dt.date(2017, 1, 5), dos=2)
        series = occupancy_series([rec], 3, (dt.date(2017, 3, 1), dt.date(2017, 3, 5)))
        assert np.all(series == 0)

    def test_balanced_stream_is_flat_after_warmup(self):
        # one arrival of stay 3 per day: resident count settles at 3
        recs = [
            make_record(arrival=dt.date(2017, 1, 1) + dt.timedelta(days=i), dos=3)
            for i in range(30)
        ]
        series = occupancy_series(recs, 10, (dt.date(2017, 1, 1), dt.date(2017, 1, 31)))
        assert np.all(series[2:29] == pytest.approx(0.3))
