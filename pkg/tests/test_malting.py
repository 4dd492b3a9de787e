import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distillery.entanglement import subtracted_logneg, tmss_logneg
from distillery.errors import DomainError
from distillery.malting import (
    MaltingParams,
    averaged_gain,
    cubic_root,
    cumulative_prob,
    kraus_trajectory_prob,
    malt,
    max_attempts,
    sample_attempts,
    subtraction_prob,
    subtraction_probs,
    tmss_generation_prob,
)

# P_0 at lambda = 0.15, T = 0.75 from the closed form, hand-substituted
P0_015_075 = 0.0043315649747962155
# averaged gain at lambda = 0.2, T = 0.9 (squeezed-vacuum baseline)
GAIN_02_09 = 3.2303177248266417


def test_params_validation():
    with pytest.raises(DomainError):
        MaltingParams(1.0, 0.9)
    with pytest.raises(DomainError):
        MaltingParams(0.2, 0.0)
    p = MaltingParams(0.2, 0.99)
    assert p.eta == pytest.approx(0.01, abs=1e-15)
    assert p.mu(3) == pytest.approx(p.x(3) * 0.99**2, abs=1e-15)


@pytest.mark.parametrize("lam,expected", [(0.0, 1.0), (0.2, 0.96), (0.15, 0.9775)])
def test_generation_prob(lam, expected):
    assert tmss_generation_prob(lam) == pytest.approx(expected, abs=1e-15)


class TestSubtractionProb:
    def test_lossless_never_clicks(self):
        p = MaltingParams(0.3, 1.0)
        assert all(subtraction_prob(p, f) == 0 for f in range(5))

    def test_reference_value(self):
        p = MaltingParams(0.15, 0.75)
        mu = 0.084375
        by_hand = 0.19140625 * 0.0225 * 0.9775 * (1 + mu * mu) / (1 - mu * mu) ** 3
        assert subtraction_prob(p, 0) == pytest.approx(by_hand, rel=1e-14)
        assert subtraction_prob(p, 0) == pytest.approx(P0_015_075, rel=1e-14)
        assert subtraction_prob(p, 0) == pytest.approx(4.331e-3, abs=1e-6)

    @pytest.mark.parametrize("lam", [0.1, 0.2, 0.4])
    @pytest.mark.parametrize("T", [0.75, 0.9, 0.99])
    def test_kraus_oracle(self, lam, T):
        p = MaltingParams(lam, T)
        for f in range(11):
            assert abs(subtraction_prob(p, f) - kraus_trajectory_prob(p, f, 60)) < 1e-12

    def test_vectorized_matches_scalar(self):
        p = MaltingParams(0.25, 0.85)
        np.testing.assert_allclose(subtraction_probs(p, 30),
                                   [subtraction_prob(p, f) for f in range(31)], rtol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(lam=st.floats(0.01, 0.95), T=st.floats(0.05, 0.999))
    def test_strictly_decreasing(self, lam, T):
        probs = subtraction_probs(MaltingParams(lam, T), 50)
        probs = probs[probs > 1e-300]
        assert np.all(np.diff(probs) < 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            subtraction_prob(MaltingParams(0.2, 0.9), -1)


class TestCumulative:
    def test_first_term(self):
        p = MaltingParams(0.2, 0.9)
        assert cumulative_prob(p, 0) == pytest.approx(subtraction_prob(p, 0), rel=1e-15)

    def test_bounded_and_monotone(self):
        p = MaltingParams(0.2, 0.9)
        probs = subtraction_probs(p, 10_000)
        partial = np.cumsum(probs)
        assert np.all(np.diff(partial) >= 0)
        assert cumulative_prob(p, 10_000) <= 1.0
        assert np.all(partial >= partial[0])


class TestThreshold:
    def test_reference_value(self):
        res = max_attempts(MaltingParams(0.2, 0.99))
        assert res.f_c == 60
        assert res.bounded

    @pytest.mark.parametrize("lam", [0.01, 0.2, 0.5, 0.9])
    def test_cubic_residual(self, lam):
        r = cubic_root(lam)
        assert 0 < r < 1
        assert abs(r**3 + (1 - 2 * lam) * r**2 + (2 - lam) * r - lam) < 1e-12

    def test_root_equalizes_negativity(self):
        lam = 0.2
        assert subtracted_logneg(cubic_root(lam)) == pytest.approx(tmss_logneg(lam), abs=1e-12)

    @pytest.mark.parametrize("lam,T", [(0.2, 0.99), (0.1, 0.95), (0.3, 0.9), (0.2, 0.8)])
    def test_threshold_property(self, lam, T):
        p = MaltingParams(lam, T)
        fc = int(max_attempts(p).f_c)
        assert fc >= 0
        assert subtracted_logneg(p.mu(fc)) >= tmss_logneg(lam)
        assert subtracted_logneg(p.mu(fc + 1)) < tmss_logneg(lam)

    @pytest.mark.parametrize("lam", [0.05, 0.1, 0.2, 0.3, 0.5])
    @pytest.mark.parametrize("eta", [0.001, 0.005, 0.01])
    def test_asymptotic_agrees(self, lam, eta):
        res = max_attempts(MaltingParams(lam, 1 - eta))
        assert abs(res.f_c - res.asymptotic) <= 1

    def test_lossless_is_unbounded(self):
        res = max_attempts(MaltingParams(0.2, 1.0))
        assert res.f_c == math.inf and not res.bounded

    def test_no_squeezing(self):
        with pytest.raises(DomainError):
            max_attempts(MaltingParams(0.0, 0.9))


class TestMalt:
    def test_fixed_f(self):
        out = malt(MaltingParams(0.2, 0.99), f=0)
        assert out.mu == pytest.approx(0.19602, abs=1e-15)
        assert out.mu == pytest.approx(out.x * 0.99**2, abs=1e-15)
        assert out.succeeded and out.state.coeffs[1] == pytest.approx(2 * 0.19602, rel=1e-14)

    def test_threshold_outcome_beats_tmss(self):
        p = MaltingParams(0.2, 0.99)
        out = malt(p, f=int(max_attempts(p).f_c))
        assert subtracted_logneg(out.mu) >= tmss_logneg(0.2)

    def test_seeded_is_reproducible(self):
        p = MaltingParams(0.3, 0.8)
        a = malt(p, seed=5, cap=200)
        b = malt(p, seed=5, cap=200)
        assert a.f == b.f and a.succeeded == b.succeeded

    def test_failure_is_an_outcome(self):
        # with a tiny cap and weak reflectivity failure dominates
        p = MaltingParams(0.2, 0.99)
        outs = [malt(p, seed=s, cap=0) for s in range(50)]
        fails = [o for o in outs if not o.succeeded]
        assert fails and all(o.state is None for o in fails)

    def test_monte_carlo_frequencies(self):
        p = MaltingParams(0.3, 0.8)
        cap = 40
        n = 100_000
        draws = sample_attempts(p, cap, n, seed=2024)
        probs = subtraction_probs(p, cap)
        total = 1.0 - probs.sum()
        counts = np.bincount(draws[draws >= 0], minlength=cap + 1)
        sigma = np.sqrt(n * probs * (1 - probs))
        assert np.all(np.abs(counts - n * probs) <= 3 * sigma + 1e-12)
        n_fail = np.sum(draws < 0)
        assert abs(n_fail - n * total) <= 3 * math.sqrt(n * total * (1 - total))


class TestGain:
    @pytest.mark.parametrize("T", [0.75, 0.8, 0.9, 0.95])
    @pytest.mark.parametrize("lam", [0.1, 0.2, 0.3])
    def test_gain_exceeds_one(self, lam, T):
        assert averaged_gain(MaltingParams(lam, T)) > 1

    def test_reference_value(self):
        assert averaged_gain(MaltingParams(0.2, 0.9)) == pytest.approx(GAIN_02_09, rel=1e-12)

    def test_first_attempt_baseline(self):
        p = MaltingParams(0.2, 0.9)
        fc = int(max_attempts(p).f_c)
        manual = cumulative_prob(p, fc) * subtracted_logneg(p.mu(fc)) / (
            cumulative_prob(p, 0) * subtracted_logneg(p.mu(0))
        )
        assert averaged_gain(p, baseline="first_attempt") == pytest.approx(manual, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            averaged_gain(MaltingParams(0.2, 1.0))
        with pytest.raises(DomainError):
            averaged_gain(MaltingParams(0.2, 0.9), baseline="nope")
