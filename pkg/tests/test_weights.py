"""Weight models: tail sums, tilted sums, exponent roots, ratio scans, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifsdigits import weights
from ifsdigits.errors import (
    DivergenceError,
    DomainError,
    HorizonExceededError,
    TiltThresholdError,
)
from ifsdigits.rng import substream

LUROTH = weights.luroth_model()

# Frozen oracle values, computed once with 40-digit interval arithmetic
# (direct summation of 4e5 terms plus integral remainder brackets).
TILTED_TAIL_10_075 = 0.6324949888781377
TILTED_TAIL_100_075 = 0.2000001249977
ZETA_075 = 2.0109381287137382
S_2 = 0.6009668516136755
POWER3_TAIL_10 = 0.004596219589005183


class TestModelConstruction:
    def test_luroth_weights(self):
        assert weights.weight(LUROTH, 1) == 0.5
        assert weights.weight(LUROTH, 4) == pytest.approx(1 / 20, rel=1e-15)
        assert LUROTH.rho == 2.0

    def test_power_model_normalizes(self):
        m = weights.power_model(3.0)
        p = weights.weights_range(m, 1, 20001)
        assert weights.weight(m, 1) == pytest.approx(0.831907372580707469, rel=1e-12)
        assert p[0] / p[7] == pytest.approx(8.0**3, rel=1e-12)

    def test_power_rho_validation(self):
        with pytest.raises(DomainError):
            weights.power_model(0.5)
        with pytest.raises(DomainError):
            weights.power_model(1.0)

    def test_power_log_model(self):
        m = weights.power_log_model(2.0, 1.5)
        p = weights.weights_range(m, 1, 100)
        ratio = p[49] / p[24]
        expect = (25 / 50) ** 2 * (math.log(51) / math.log(26)) ** 1.5
        assert ratio == pytest.approx(expect, rel=1e-12)

    def test_explicit_prefix_model(self):
        m = weights.explicit_prefix_model((0.4, 0.3), rho=2.0)
        assert weights.weight(m, 1) == 0.4
        assert weights.weight(m, 2) == 0.3
        assert weights.tail_sum(m, 3) == pytest.approx(0.3, rel=1e-9)

    def test_finite_model(self):
        m = weights.finite_model((0.5, 0.25, 0.25))
        assert m.support_size == 3
        assert weights.tail_sum(m, 2) == pytest.approx(0.5, rel=1e-15)
        with pytest.raises(DomainError):
            weights.finite_model((0.5, 0.4))  # does not sum to one

    def test_spec_roundtrip(self):
        for spec in (
            {"kind": "luroth"},
            {"kind": "power", "rho": 3.0},
            {"kind": "power-log", "rho": 2.0, "gamma": 1.5},
        ):
            m = weights.model_from_spec(spec)
            again = weights.model_from_spec(weights.model_to_spec(m))
            assert weights.weight(m, 7) == weights.weight(again, 7)

    def test_normalization_four_kinds(self):
        for m in (
            LUROTH,
            weights.power_model(3.0),
            weights.power_log_model(2.0, 1.0),
            weights.finite_model((0.5, 0.5)),
        ):
            hi = m.support_size + 1 if m.support_size is not None else 10**6 + 1
            total = float(np.sum(weights.weights_range(m, 1, hi)))
            if m.support_size is None:
                total += weights.tail_sum(m, hi)
            assert total == pytest.approx(1.0, abs=1e-9)


class TestTailSums:
    def test_luroth_tail_telescopes(self):
        # sum_{k >= M} 1/(k(k+1)) = 1/M exactly
        for M in (1, 2, 5, 10, 1000):
            assert weights.tail_sum(LUROTH, M) == pytest.approx(1.0 / M, rel=1e-12)

    def test_tilted_tail_oracles(self):
        got10 = weights.tilted_tail_sum(LUROTH, 10, 0.75)
        got100 = weights.tilted_tail_sum(LUROTH, 100, 0.75)
        assert got10 == pytest.approx(TILTED_TAIL_10_075, rel=1e-9)
        assert got100 == pytest.approx(TILTED_TAIL_100_075, rel=1e-9)

    def test_tilted_tail_scaling_band(self):
        # the M**(1-rho*s) scaling law: ratio to M**-0.5 settles near 2
        for M in (10, 100, 1000, 10000):
            ratio = weights.tilted_tail_sum(LUROTH, M, 0.75) * math.sqrt(M)
            assert 1.8 <= ratio <= 2.2

    def test_zeta_oracle(self):
        assert weights.tilted_tail_sum(LUROTH, 1, 0.75) == pytest.approx(
            ZETA_075, rel=1e-9
        )

    def test_divergent_tilt_rejected(self):
        with pytest.raises(DivergenceError):
            weights.tilted_tail_sum(LUROTH, 1, 0.5)  # rho*s = 1
        with pytest.raises(DivergenceError):
            weights.tilted_tail_sum(LUROTH, 10, 0.3)

    def test_finite_model_any_tilt(self):
        m = weights.finite_model((0.5, 0.5))
        assert weights.tilted_tail_sum(m, 1, 0.5) == pytest.approx(
            2 * 0.5**0.5, rel=1e-12
        )

    def test_power3_tail(self):
        m = weights.power_model(3.0)
        assert weights.tail_sum(m, 10) == pytest.approx(POWER3_TAIL_10, rel=1e-9)

    def test_tilt_monotone_in_s(self):
        grid = np.linspace(0.55, 1.0, 10)
        vals = [weights.tilted_tail_sum(LUROTH, 1, s) for s in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def _bisect_s2() -> float:
    # independent root oracle for p_1**s + p_2**s = 1
    def f(s):
        return 0.5**s + (1 / 6) ** s - 1

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestExponentSolver:
    def test_s1_is_zero_exactly(self):
        assert weights.partial_sum_exponent(LUROTH, 1) == 0.0

    def test_residual_grid(self):
        for K in (2, 3, 7, 10, 50, 100, 500, 1000, 5000, 10000):
            s = weights.partial_sum_exponent(LUROTH, K)
            p = weights.weights_range(LUROTH, 1, K + 1)
            assert abs(float(np.sum(p**s)) - 1.0) < 1e-12

    def test_monotone_in_k(self):
        vals = [weights.partial_sum_exponent(LUROTH, K) for K in range(1, 40)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_s2_against_bisection_oracle(self):
        assert weights.partial_sum_exponent(LUROTH, 2) == pytest.approx(
            _bisect_s2(), abs=1e-12
        )
        assert abs(weights.partial_sum_exponent(LUROTH, 2) - 0.601) < 1e-3

    def test_s1000_above_09(self):
        assert weights.partial_sum_exponent(LUROTH, 1000) > 0.9

    @given(st.integers(min_value=1, max_value=200))
    def test_residual_property(self, K):
        s = weights.partial_sum_exponent(LUROTH, K)
        p = weights.weights_range(LUROTH, 1, K + 1)
        assert abs(float(np.sum(p**s)) - 1.0) < 1e-12
        assert 0.0 <= s < 1.0


class TestPotterScan:
    def test_luroth_scan(self):
        rep = weights.potter_scan(LUROTH, 1.0)
        assert rep.k_eps == 1
        assert rep.C_eps <= 2.0
        assert weights.verify_potter_report(LUROTH, rep)

    def test_power_log_scan(self):
        m = weights.power_log_model(2.0, 2.0)
        rep = weights.potter_scan(m, 0.5)
        assert rep.k_eps >= 1
        assert weights.verify_potter_report(m, rep)

    def test_finite_model_rejected(self):
        with pytest.raises(DomainError):
            weights.potter_scan(weights.finite_model((0.5, 0.5)), 1.0)

    def test_scan_limit_guard(self):
        # depressed prefix entries push the half-bound start past the window
        prefix = (0.4,) + (1e-12,) * 39
        m = weights.explicit_prefix_model(prefix, rho=2.0)
        with pytest.raises(HorizonExceededError):
            weights.potter_scan(m, 1.0, scan_limit=64)
        rep = weights.potter_scan(m, 1.0, scan_limit=10_000)
        assert rep.k_eps == 41  # first index past the depressed prefix
        assert weights.verify_potter_report(m, rep)


class TestSampling:
    def test_luroth_frequencies(self):
        rng = substream(17, 0xA11)
        sampler = weights.DigitSampler(LUROTH)
        draws = sampler.sample(rng, 200_000)
        for k in range(1, 9):
            p = weights.weight(LUROTH, k)
            got = np.mean(draws == k)
            sd = math.sqrt(p * (1 - p) / draws.size)
            assert abs(got - p) < 4.5 * sd

    def test_tilted_frequencies(self):
        rng = substream(23, 0xA12)
        sampler = weights.DigitSampler(LUROTH, s=0.75)
        draws = sampler.sample(rng, 200_000)
        z = weights.tilted_tail_sum(LUROTH, 1, 0.75)
        for k in range(1, 6):
            q = weights.weight(LUROTH, k) ** 0.75 / z
            got = np.mean(draws == k)
            sd = math.sqrt(q * (1 - q) / draws.size)
            assert abs(got - q) < 4.5 * sd

    def test_sampler_reproducible(self):
        a = weights.DigitSampler(LUROTH).sample(substream(3, 1), 1000)
        b = weights.DigitSampler(LUROTH).sample(substream(3, 1), 1000)
        assert np.array_equal(a, b)

    def test_single_draw_helper(self):
        # inverse CDF at u: cumulative through k is k/(k+1)
        assert weights.sample_digit(LUROTH, 0.75) == 4
        assert weights.sample_digit(LUROTH, 0.4999) == 1
        m = weights.power_model(3.0)
        assert weights.sample_digit(m, 0.5) == 1
        with pytest.raises(DomainError):
            weights.sample_digit(LUROTH, 1.0)

    def test_deep_tail_draws_valid(self):
        # a heavy tail pushes some draws past the cumulative table
        rng = substream(29, 0xA13)
        m = weights.power_model(1.5)
        draws = weights.DigitSampler(m, table_size=1 << 10).sample(rng, 50_000)
        assert draws.min() >= 1
        assert draws.max() > 1 << 10


class TestSubstream:
    def test_replay_and_separation(self):
        a = substream(7, 1).integers(0, 2**63, size=8)
        b = substream(7, 1).integers(0, 2**63, size=8)
        c = substream(7, 2).integers(0, 2**63, size=8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_path_dimensions_distinct(self):
        a = substream(7, 1, 2).integers(0, 2**63, size=8)
        b = substream(7, 1).integers(0, 2**63, size=8)
        assert not np.array_equal(a, b)


class TestInvertTailGuard:
    def test_unreachable_quantile_raises(self):
        with pytest.raises(TiltThresholdError):
            # no index k <= 2**62 has tail mass below 1e-300
            weights._invert_tail(LUROTH, 1.0, 1e-300, 1)
