"""The three per-observation indices: frozen reference values and properties.

Reference values were computed independently by direct evaluation of each
index's definition and are asserted to 1e-6.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bncritic.errors import (
    DegenerateBaselineError,
    LogOfZeroError,
    SingleStateError,
    ZeroProbabilityObservedError,
)
from bncritic.score import (
    entropy_penalty,
    good_log_score,
    ranked_probability_score,
    weaver_surprise,
)

TOL = 1e-6


def simplexes(k_min=2, k_max=6):
    """Random probability vectors with strictly positive entries."""
    return st.integers(k_min, k_max).flatmap(
        lambda k: st.lists(st.floats(1e-3, 1.0), min_size=k, max_size=k)
    ).map(lambda ws: np.asarray(ws) / np.sum(ws))


class TestWeaverSurprise:
    def test_uniform_is_one(self):
        p = np.full(4, 0.25)
        for j in range(4):
            assert abs(weaver_surprise(p, j) - 1.0) < TOL

    def test_confident_hit(self):
        # sum of squares 0.8138 over p_observed 0.9
        assert abs(weaver_surprise((0.9, 0.05, 0.03, 0.02), 0) - 0.90422222) < TOL

    def test_rare_outcome(self):
        # same forecast, observed the 2% state: 0.8138 / 0.02
        assert abs(weaver_surprise((0.9, 0.05, 0.03, 0.02), 3) - 40.69) < TOL

    def test_zero_probability_observed(self):
        with pytest.raises(ZeroProbabilityObservedError):
            weaver_surprise((1.0, 0.0), 1)

    @given(simplexes())
    def test_dominant_state_not_surprising(self, p):
        d = int(np.argmax(p))
        mean_p = float(np.sum(p**2))
        assert weaver_surprise(p, d) <= 1.0 + 1e-12
        for j in range(p.shape[0]):
            if p[j] < mean_p:
                assert weaver_surprise(p, j) >= 1.0 - 1e-12

    @given(simplexes(), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, p, rnd):
        perm = list(range(p.shape[0]))
        rnd.shuffle(perm)
        j = rnd.randrange(p.shape[0])
        a = weaver_surprise(p, perm[j])
        b = weaver_surprise(p[perm], j)
        assert abs(a - b) < 1e-9


class TestGoodLogScore:
    def test_certain_hit_two_states(self):
        # b = ln 2, perfect forecast: ln(ln 2)
        val = good_log_score((1.0, 0.0), 0, (0.5, 0.5))
        assert abs(val - math.log(math.log(2.0))) < TOL
        assert abs(val - (-0.3665129)) < TOL

    def test_uniform_forecast_four_states(self):
        # b = ln 4, modal prob 0.25: ln(ln 4 * 0.25)
        val = good_log_score((0.25, 0.25, 0.25, 0.25), 0, (0.25, 0.25, 0.25, 0.25))
        assert abs(val - (-1.0596601)) < TOL

    def test_modal_tie_broken_by_lowest_index(self):
        # states 0 and 1 tie; state 0 is the designated prediction
        p = (0.4, 0.4, 0.2)
        x = (1 / 3, 1 / 3, 1 / 3)
        hit = good_log_score(p, 0, x)
        miss = good_log_score(p, 1, x)
        b = entropy_penalty(x)
        assert abs(hit - math.log(b * 0.4)) < TOL
        assert abs(miss - math.log(b * 0.6)) < TOL

    def test_degenerate_baseline(self):
        with pytest.raises(DegenerateBaselineError):
            good_log_score((0.5, 0.5), 0, (1.0, 0.0))

    def test_log_of_zero(self):
        # modal probability 1 and the prediction missed: ln(b * 0)
        with pytest.raises(LogOfZeroError):
            good_log_score((0.0, 1.0), 0, (0.5, 0.5))

    def test_entropy_penalty_zero_times_log_zero(self):
        assert abs(entropy_penalty((0.5, 0.5, 0.0)) - math.log(2.0)) < TOL

    @given(simplexes())
    def test_hit_beats_miss_for_confident_forecasts(self, p):
        x = np.full(p.shape[0], 1.0 / p.shape[0])
        modal = int(np.argmax(p))
        if p[modal] <= 0.5 or p[modal] >= 1.0:
            return
        other = (modal + 1) % p.shape[0]
        assert good_log_score(p, modal, x) > good_log_score(p, other, x)

    @given(simplexes(), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, p, rnd):
        perm = list(range(p.shape[0]))
        rnd.shuffle(perm)
        x = np.full(p.shape[0], 1.0 / p.shape[0])
        j = rnd.randrange(p.shape[0])
        # guard against permutations that change the modal tie-break winner
        if np.sum(p == p.max()) > 1:
            return
        a = good_log_score(p, perm[j], x)
        b = good_log_score(p[perm], j, x[perm])
        assert abs(a - b) < 1e-9


class TestRankedProbabilityScore:
    def test_perfect_prediction(self):
        assert abs(ranked_probability_score((1.0, 0.0), 0) - 1.0) < TOL

    def test_poorest_prediction(self):
        assert abs(ranked_probability_score((0.0, 1.0), 0) - 0.0) < TOL

    def test_uniform_four_states(self):
        p = (0.25, 0.25, 0.25, 0.25)
        assert abs(ranked_probability_score(p, 0) - 0.7083333) < TOL

    def test_single_state(self):
        with pytest.raises(SingleStateError):
            ranked_probability_score((1.0,), 0)

    @given(simplexes(), st.data())
    def test_range(self, p, data):
        j = data.draw(st.integers(0, p.shape[0] - 1))
        s = ranked_probability_score(p, j)
        assert -1e-9 <= s <= 1.0 + 1e-9

    @given(st.integers(2, 6), st.data())
    def test_point_mass_is_the_only_perfect_score(self, k, data):
        m = data.draw(st.integers(0, k - 1))
        j = data.draw(st.integers(0, k - 1))
        p = np.zeros(k)
        p[m] = 1.0
        s = ranked_probability_score(p, j)
        if m == j:
            assert abs(s - 1.0) < 1e-9
        else:
            assert s < 1.0 - 1e-9

    def test_distance_monotonicity_for_point_mass(self):
        k = 5
        p = np.zeros(k)
        p[0] = 1.0
        scores = [ranked_probability_score(p, j) for j in range(k)]
        assert all(a >= b - 1e-12 for a, b in zip(scores, scores[1:]))

    def test_not_permutation_invariant(self):
        # swapping the first two states changes the score: order matters
        p = np.array([0.6, 0.3, 0.1])
        a = ranked_probability_score(p, 0)          # 0.915
        b = ranked_probability_score(p[[1, 0, 2]], 1)  # same event, relabeled
        assert abs(a - 0.915) < TOL
        assert abs(a - b) > 0.01
