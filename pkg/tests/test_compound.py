import math

import numpy as np
import pytest

from cluster_extremes import (
    CompoundPmf,
    InvalidArgumentError,
    TimeSeries,
    compound_profile,
    count_exceedances,
    empirical_compound,
    make_layout,
)

HAND_VALUES = [5, 1, 9, 2, 7, 3, 8, 4, 6, 0, 10, 11]


def pointwise(series, k, tau):
    layout = make_layout(series.n, k)
    return empirical_compound(count_exceedances(series, layout, tau), k)


class TestEmpiricalCompound:
    def test_hand_example(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        layout = make_layout(12, 3)
        pmf = empirical_compound(count_exceedances(series, layout, 1.0), 3)
        assert pmf.probs == (1 / 3, 1 / 3, 1 / 3)

    def test_all_zero_counts(self):
        series = TimeSeries(np.full(10, 2.0))
        pmf = pointwise(series, 5, 1.0)
        assert pmf.probs == (1.0,)

    def test_all_mass_at_one(self):
        # 4 blocks of 2; the top 4 values sit one per block
        series = TimeSeries(np.array([9.0, 0, 8, 1, 7, 2, 6, 3]))
        pmf = pointwise(series, 4, 1.0)
        assert pmf.probs == (0.0, 1.0)

    def test_entries_are_multiples_of_one_over_k(self):
        rng = np.random.default_rng(5)
        series = TimeSeries(rng.normal(size=300))
        for k in (10, 17, 30):
            pmf = pointwise(series, k, 1.2)
            scaled = np.array(pmf.probs) * k
            assert np.array_equal(scaled, np.round(scaled))

    def test_wrong_length_rejected(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        layout = make_layout(12, 3)
        counts = count_exceedances(series, layout, 1.0)
        with pytest.raises(InvalidArgumentError):
            empirical_compound(counts, 4)


class TestCompoundPmfType:
    def test_mass_above_one_rejected(self):
        with pytest.raises(InvalidArgumentError):
            CompoundPmf(probs=(0.8, 0.8), tau=1.0)

    def test_negative_entry_rejected(self):
        with pytest.raises(InvalidArgumentError):
            CompoundPmf(probs=(-0.1, 0.5), tau=1.0)

    def test_prob_beyond_support_is_zero(self):
        pmf = CompoundPmf(probs=(0.5, 0.5), tau=1.0)
        assert pmf.prob(7) == 0.0

    def test_truncation_mass(self):
        pmf = CompoundPmf(probs=(0.5, 0.25), tau=1.0)
        assert pmf.truncation_mass == pytest.approx(0.25, abs=1e-15)

    def test_json_shape(self):
        doc = CompoundPmf(probs=(0.5, 0.5), tau=1.25).to_json_dict()
        assert doc == {"tau": 1.25, "probs": [0.5, 0.5]}


class TestProfile:
    def test_hand_breakpoints(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        profile = compound_profile(series, 3, 0.7, 1.3)
        assert profile.breakpoints == [1.0]
        assert len(profile.pieces) == 2
        # the value at tau = 1 is the three-exceedance pmf
        assert profile.at(1.0).probs == (1 / 3, 1 / 3, 1 / 3)

    def test_single_piece_interval(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        # no multiple of 1/3 inside (0.35, 0.6]
        profile = compound_profile(series, 3, 0.35, 0.6)
        assert len(profile.pieces) == 1
        assert profile.at(0.5).probs == pointwise(series, 3, 0.5).probs

    def test_pointwise_consistency_everywhere(self):
        rng = np.random.default_rng(9)
        series = TimeSeries(rng.normal(size=2000))
        k, sigma, phi = 100, 0.7, 1.3
        profile = compound_profile(series, k, sigma, phi)
        taus = list(rng.uniform(sigma + 1e-9, phi, size=50))
        taus += [j / k for j in range(71, 131)]  # exact breakpoints
        taus += [phi]
        for tau in taus:
            assert profile.at(tau).probs == pointwise(series, k, tau).probs

    def test_piece_count_bound(self):
        rng = np.random.default_rng(13)
        series = TimeSeries(rng.normal(size=900))
        for k, sigma, phi in ((30, 0.7, 1.3), (45, 0.41, 2.3), (9, 0.2, 0.9)):
            profile = compound_profile(series, k, sigma, phi)
            bound = math.floor(k * phi) - math.ceil(k * sigma) + 2
            assert len(profile.pieces) <= bound

    def test_piece_lengths_cover_interval(self):
        rng = np.random.default_rng(14)
        series = TimeSeries(rng.normal(size=400))
        profile = compound_profile(series, 20, 0.7, 1.3)
        total = sum(p.length for p in profile.pieces)
        assert total == pytest.approx(0.6, abs=1e-12)

    def test_ties_handled_like_direct_path(self):
        # heavy ties: strict exceedance skips whole runs of equal values
        values = np.array([5.0, 5, 5, 1, 5, 2, 5, 3, 0, 5, 5, 4])
        series = TimeSeries(values)
        k = 3
        profile = compound_profile(series, k, 0.4, 2.2)
        for tau in (0.5, 0.9, 1.0, 1.4, 2.0, 2.2):
            assert profile.at(tau).probs == pointwise(series, k, tau).probs

    def test_bad_bounds(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        with pytest.raises(InvalidArgumentError):
            compound_profile(series, 3, 1.3, 0.7)
        with pytest.raises(InvalidArgumentError):
            compound_profile(series, 3, 0.7, 4.0)  # phi >= block length

    def test_out_of_interval_evaluation_rejected(self):
        series = TimeSeries(np.array(HAND_VALUES, dtype=float))
        profile = compound_profile(series, 3, 0.7, 1.3)
        with pytest.raises(InvalidArgumentError):
            profile.at(0.2)
