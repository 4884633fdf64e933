"""Block schedules: counting, sampling, the sandwich, and block-measure geometry."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifsdigits import linear, weights
from ifsdigits.errors import (
    DepthError,
    DomainError,
    EnumerationSizeError,
    InfeasibleError,
    NotInSupportError,
)
from ifsdigits.rng import substream

LUROTH = weights.luroth_model()


class TestRateAndProfile:
    def test_decimal_rates_exact(self):
        assert linear.as_rate(0.3) == Fraction(3, 10)
        assert linear.as_rate(0.5) == Fraction(1, 2)
        assert linear.as_rate(1) == Fraction(1)

    def test_rate_domain(self):
        for bad in (0, -0.5, 1.5):
            with pytest.raises(DomainError):
                linear.as_rate(bad)

    def test_profile_is_ceiling(self):
        for theta in (Fraction(3, 10), Fraction(1, 2), Fraction(1)):
            prof = linear.distinctness_profile(theta, 16)
            for t in range(17):
                assert prof.r[t] == -((-theta.numerator * t) // theta.denominator)

    def test_new_times(self):
        prof = linear.distinctness_profile(Fraction(1, 2), 8)
        assert prof.new_times() == (1, 3, 5, 7)
        assert prof.new_count == 4

    def test_theta_one_all_new(self):
        prof = linear.distinctness_profile(1, 6)
        assert prof.new_times() == (1, 2, 3, 4, 5, 6)


class TestCountBlocks:
    def test_small_oracles(self):
        # ordered distinct pairs from 3 symbols and the 2-symbol half-rate block
        assert linear.count_blocks(3, 2, 1).exact == 6
        assert linear.count_blocks(2, 4, 0.5).exact == 4

    def test_formula_equals_enumeration_grid(self):
        for N, L, theta in itertools.product(
            range(1, 6), range(1, 7), (0.3, 0.5, 1)
        ):
            prof = linear.distinctness_profile(theta, L)
            if prof.new_count > N:
                assert list(linear.enumerate_blocks(N, L, theta)) == []
                with pytest.raises(InfeasibleError):
                    linear.count_blocks(N, L, theta)
                continue
            blocks = list(linear.enumerate_blocks(N, L, theta))
            assert linear.count_blocks(N, L, theta).exact == len(blocks)
            assert len(set(blocks)) == len(blocks)

    def test_log_count_matches_exact(self):
        bc = linear.count_blocks(5, 6, 0.5)
        assert bc.log_count == pytest.approx(math.log(bc.exact), rel=1e-12)

    def test_enumerated_blocks_satisfy_profile(self):
        prof = linear.distinctness_profile(0.5, 6)
        for block in linear.enumerate_blocks(4, 6, 0.5):
            seen = set()
            for t, d in enumerate(block, start=1):
                seen.add(d)
                assert len(seen) == prof.r[t]

    def test_huge_exact_count_degrades_to_log(self):
        bc = linear.count_blocks(2**70, 2, 1)
        assert bc.exact is None  # value needs more than 128 bits
        assert bc.log_count == pytest.approx(2 * 70 * math.log(2), rel=1e-3)

    def test_enumeration_size_guard(self):
        with pytest.raises(EnumerationSizeError):
            list(linear.enumerate_blocks(40, 6, 1, limit=1000))


class TestScheduleShape:
    def test_levels_are_dyadic_disjoint(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=8)
        for lev in sched.levels:
            assert lev.length == 2**lev.j
        windows = [
            range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size)
            for lev in sched.levels
        ]
        for a, b in zip(windows, windows[1:]):
            assert a.stop == b.start  # adjacent dyadic windows, no overlap

    def test_boundaries(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=5)
        assert [sched.boundary(j) for j in range(6)] == [0, 2, 6, 14, 30, 62]

    def test_k1_defaults_to_ratio_scan(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=3)
        assert sched.k1 == weights.potter_scan(LUROTH, 1.0).k_eps

    def test_finite_support_guard(self):
        m = weights.finite_model((0.25,) * 4)
        with pytest.raises(DomainError):
            linear.build_block_schedule(m, 1.0, depth=4)


class TestSamplingAndSandwich:
    def test_sandwich_exact(self):
        for theta in (0.3, 0.5, 1):
            sched = linear.build_block_schedule(LUROTH, theta, depth=8)
            for seed in range(3):
                word = sched.sample_word(8, substream(seed, 0x11EA, 8))
                assert linear.sandwich_violations(theta, word) == []

    def test_sandwich_catches_bad_words(self):
        # a constant word has D_n = 1, violating theta = 1 from n = 2 on
        bad = np.ones(6, dtype=np.int64)
        assert linear.sandwich_violations(1, bad) != []

    def test_sample_reproducible(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=6)
        a = sched.sample_word(6, substream(4, 1))
        b = sched.sample_word(6, substream(4, 1))
        assert np.array_equal(a, b)

    def test_blocks_stay_in_alphabet(self):
        sched = linear.build_block_schedule(LUROTH, 0.3, depth=7)
        word = sched.sample_word(7, substream(2, 3))
        pos = 0
        for lev in sched.levels:
            chunk = word[pos : pos + lev.length]
            assert chunk.min() >= lev.alphabet_start
            assert chunk.max() < lev.alphabet_start + lev.alphabet_size
            pos += lev.length

    def test_block_uniformity(self):
        # level-2 blocks of the half-rate schedule are uniform over their support
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=2)
        lev = sched.level(2)
        support = list(
            linear.enumerate_blocks(
                lev.alphabet_size,
                lev.length,
                sched.theta,
                alphabet=range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size),
            )
        )
        rng = substream(8, 0xB10C)
        draws = 20_000
        counts = {b: 0 for b in support}
        for _ in range(draws):
            counts[tuple(sched.sample_block(2, rng))] += 1
        expect = draws / len(support)
        chi2 = sum((c - expect) ** 2 / expect for c in counts.values())
        # dof = len(support) - 1 = 3; 0.999 quantile is about 16.3
        assert chi2 < 16.3


class TestBlockMeasure:
    def test_full_word_mass(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=5)
        word = sched.sample_word(5, substream(1, 2))
        expect = -sum(lev.log_count for lev in sched.levels)
        assert sched.log_mass(word) == pytest.approx(expect, rel=1e-12)

    def test_level_masses_sum_to_parent(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=3)
        word = sched.sample_word(2, substream(3, 1))
        base = math.exp(sched.log_mass(word))
        lev = sched.level(3)
        total = 0.0
        for block in linear.enumerate_blocks(
            lev.alphabet_size,
            lev.length,
            sched.theta,
            alphabet=range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size),
        ):
            total += math.exp(sched.log_mass(np.concatenate([word, block])))
        assert total == pytest.approx(base, rel=1e-10)

    def test_mid_block_one_step_additivity(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=4)
        word = sched.sample_word(4, substream(7, 5))
        prefix = word[:9]  # three digits into the level-3 block
        lev = sched.level(3)
        base = math.exp(sched.log_mass(prefix))
        prof = lev.profile
        seen = sorted(set(int(d) for d in prefix[6:9]))
        if prof.is_new[4]:
            cands = [
                a
                for a in range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size)
                if a not in seen
            ]
        else:
            cands = seen
        total = sum(
            math.exp(sched.log_mass(np.concatenate([prefix, [a]]))) for a in cands
        )
        assert total == pytest.approx(base, rel=1e-10)

    def test_out_of_support_words(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=3)
        with pytest.raises(NotInSupportError):
            sched.log_mass([10**6, 1])  # outside the level-1 alphabet
        word = sched.sample_word(3, substream(0, 0))
        doubled = np.concatenate([word, word])
        with pytest.raises(DepthError):
            sched.log_mass(doubled)

    def test_repeat_time_must_reuse(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=2)
        lev1 = sched.level(1)
        a = lev1.alphabet_start
        # level 1 block is (a, a); a fresh digit at the repeat time is invalid
        lev2 = sched.level(2)
        b, c = lev2.alphabet_start, lev2.alphabet_start + 1
        with pytest.raises(NotInSupportError):
            sched.log_mass([a, a, b, c])  # time 2 of block 2 must repeat b


class TestTraceAndDimension:
    def test_trace_matches_mass_and_diam(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=6)
        word = sched.sample_word(6, substream(3, 0x11EA, 6))
        tr = linear.point_trace(sched, word)
        assert tr["log_mass"][-1] == pytest.approx(sched.log_mass(word), rel=1e-12)
        cyl_log = float(
            np.sum(np.log([weights.weight(LUROTH, int(d)) for d in word]))
        )
        assert tr["log_diam"][-1] == pytest.approx(cyl_log, rel=1e-12)
        assert tr["local_dim"][-1] == pytest.approx(sched.local_dimension(word), rel=1e-12)

    def test_trace_bounds_hold(self):
        sched = linear.build_block_schedule(LUROTH, 0.3, depth=6)
        word = sched.sample_word(6, substream(5, 0x11EA, 6))
        tr = linear.point_trace(sched, word)
        assert np.all(tr["distinct"] >= tr["target"] - 1e-9)
        assert np.all(tr["distinct"] < tr["upper"])

    def test_local_dimension_needs_alignment(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=4)
        word = sched.sample_word(4, substream(1, 1))
        with pytest.raises(DomainError):
            sched.local_dimension(word[:7])

    def test_dimension_approaches_half(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=12)
        word = sched.sample_word(12, substream(0, 0x11EA, 12))
        d12 = sched.local_dimension(word)
        d6 = sched.local_dimension(word[: sched.boundary(6)])
        assert abs(d12 - 0.5) < abs(d6 - 0.5)


class TestIntervalMass:
    def test_full_interval(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=3)
        assert sched.interval_mass(0.0, 1.0, depth_cap=2) == (1.0, 1.0)

    def test_bracket_contains_enumerated_mass(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=3)
        a, b = 0.05, 0.2
        lower, upper = sched.interval_mass(a, b, depth_cap=2)
        assert 0.0 <= lower <= upper <= 1.0
        # brute force from the full depth-2 cylinder decomposition
        from ifsdigits import codec

        total_in = 0.0
        total_touch = 0.0
        lev1, lev2 = sched.levels[0], sched.levels[1]
        for b1 in linear.enumerate_blocks(
            lev1.alphabet_size, lev1.length, sched.theta,
            alphabet=range(lev1.alphabet_start, lev1.alphabet_start + lev1.alphabet_size),
        ):
            for b2 in linear.enumerate_blocks(
                lev2.alphabet_size, lev2.length, sched.theta,
                alphabet=range(lev2.alphabet_start, lev2.alphabet_start + lev2.alphabet_size),
            ):
                word = b1 + b2
                mass = math.exp(sched.log_mass(np.asarray(word)))
                cyl = codec.cylinder(LUROTH, word, exact=False)
                lo, hi = cyl.left, cyl.left + cyl.diam
                if lo >= a and hi <= b:
                    total_in += mass
                if hi > a and lo < b:
                    total_touch += mass
        assert lower <= total_in + 1e-12
        assert upper >= total_in - 1e-12
        assert upper <= total_touch + 1e-12

    def test_degenerate_interval(self):
        sched = linear.build_block_schedule(LUROTH, 0.5, depth=2)
        assert sched.interval_mass(0.7, 0.3, depth_cap=1) == (0.0, 0.0)


@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=1, max_value=5),
    st.sampled_from([Fraction(3, 10), Fraction(1, 2), Fraction(1)]),
)
def test_count_formula_property(N, L, theta):
    prof = linear.distinctness_profile(theta, L)
    if prof.new_count > N:
        assert list(linear.enumerate_blocks(N, L, theta)) == []
    else:
        assert linear.count_blocks(N, L, theta).exact == len(
            list(linear.enumerate_blocks(N, L, theta))
        )
