"""Self-verification suites: named invariant checks over all modules.

Each check is a small, deterministic procedure that either returns a
detail string or raises :class:`CheckFailure`.  The ``quick`` tier runs in
well under a minute; the ``full`` tier adds acceptance-grade runs (larger
Monte Carlo sizes, deeper constructions).  Every check receives the run
seed so failures are reproducible from the report alone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codec, linear, occupancy, sublinear, tilt, weights
from .errors import NotAdmissibleError
from .rng import DEFAULT_SEED, substream

__all__ = ["CheckFailure", "CheckResult", "VerifyReport", "run_suite", "check_names"]


class CheckFailure(AssertionError):
    """A named invariant did not hold."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    tier: str
    seed: int
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_text(self) -> str:
        lines = [f"# verification tier={self.tier} seed={self.seed}"]
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"{mark} {r.name} ({r.seconds:.2f}s): {r.detail}")
        n_fail = sum(not r.passed for r in self.results)
        lines.append(
            f"# {len(self.results)} checks, {n_fail} failed"
            if n_fail
            else f"# {len(self.results)} checks, all passed"
        )
        return "\n".join(lines) + "\n"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailure(msg)


# -- weights ------------------------------------------------------------------------


def _models_under_test():
    return [
        ("luroth", weights.luroth_model()),
        ("power(3)", weights.power_model(3.0)),
        ("power-log(2,1)", weights.power_log_model(2.0, 1.0)),
        ("explicit-prefix", weights.explicit_prefix_model((0.4, 0.2), 2.5)),
    ]


def check_weights_normalization(seed: int, threads: int) -> str:
    worst = 0.0
    for name, model in _models_under_test():
        err = abs(weights.tail_sum(model, 1) - 1.0)
        worst = max(worst, err)
        _require(err < 1e-12, f"{name}: total mass off by {err:.2e}")
    return f"four model kinds normalized, worst residual {worst:.1e}"


def check_weights_tilt_monotone(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    grid = np.linspace(0.55, 1.0, 10)
    vals = [weights.tilted_tail_sum(model, 1, float(s)) for s in grid]
    _require(
        all(a > b for a, b in zip(vals, vals[1:])),
        "tilted total not strictly decreasing in s",
    )
    return f"Z(s) strictly decreasing over 10 grid points, Z(0.55)={vals[0]:.4f}"


def check_weights_exponent_solver(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    _require(weights.partial_sum_exponent(model, 1) == 0.0, "K=1 root must be 0")
    prev = 0.0
    worst = 0.0
    for K in (2, 10, 100, 1000, 10_000):
        s = weights.partial_sum_exponent(model, K)
        _require(s >= prev, f"root decreased at K={K}")
        _require(s < 1.0, f"root reached 1 at K={K}")
        prev = s
        p = weights.weights_range(model, 1, K + 1)
        resid = abs(float(np.sum(p**s)) - 1.0)
        worst = max(worst, resid)
        _require(resid < 1e-12, f"residual {resid:.2e} at K={K}")
    s2 = weights.partial_sum_exponent(model, 2)
    _require(abs(s2 - 0.6012) < 1e-3, f"K=2 root {s2:.5f} off the oracle 0.6012")
    _require(prev > 0.9, f"K=10000 root {prev:.4f} not above 0.9")
    return f"roots monotone, worst residual {worst:.1e}, s(2)={s2:.4f}"


def check_weights_potter(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rep = weights.potter_scan(model, 1.0)
    _require(rep.k_eps == 1, f"k_eps={rep.k_eps}, expected 1")
    _require(rep.C_eps <= 2.0, f"C_eps={rep.C_eps} above 2")
    _require(
        weights.verify_potter_report(model, rep), "independent re-scan disagreed"
    )
    return f"dyadic ratio scan: k_eps={rep.k_eps}, C_eps={rep.C_eps}, re-verified"


def check_weights_sampler_law(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rng = substream(seed, 0x5A)
    n = 200_000
    draws = weights.DigitSampler(model).sample(rng, n)
    worst = 0.0
    for k in range(1, 11):
        p = weights.weight(model, k)
        zscore = abs(np.count_nonzero(draws == k) - n * p) / math.sqrt(
            n * p * (1 - p)
        )
        worst = max(worst, zscore)
        _require(zscore < 4.0, f"digit {k} frequency off by {zscore:.1f} sd")
    return f"digit frequencies within 4 sd for k<=10 (worst {worst:.2f})"


# -- codec --------------------------------------------------------------------------


def check_codec_roundtrip(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rng = substream(seed, 0xC0DEC)
    for layout in codec.LAYOUTS:
        for _ in range(100):
            den = int(rng.integers(2, 1 << 32))
            num = int(rng.integers(1, den))
            x = Fraction(num, den)
            word = codec.encode(model, x, 12, layout=layout)
            cyl = codec.cylinder(model, word, layout=layout, exact=True)
            _require(
                cyl.contains(x),
                f"{layout}: {x} escaped its own depth-12 cylinder",
            )
    return "200 exact rationals stayed inside their encoded cylinders"


def check_codec_partition(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    for k in range(1, 101):
        left, right = codec.digit_interval(model, k, exact=True)
        nxt_left, _ = codec.digit_interval(model, k + 1, exact=True)
        _require(right == nxt_left, f"gap between branch {k} and {k + 1}")
    pmodel = weights.power_model(3.0)
    for k in range(1, 101):
        left, right = codec.digit_interval(pmodel, k)
        nxt_left, _ = codec.digit_interval(pmodel, k + 1)
        _require(right == nxt_left, f"float partition gap at branch {k}")
    return "branch intervals tile [0,1) exactly for k<=100 (rational and float)"


def check_codec_diameter(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rng = substream(seed, 0xD1A)
    word = weights.DigitSampler(model).sample(rng, 1000)
    cyl = codec.cylinder(model, word, exact=False)
    direct = float(np.sum(weights.log_weights_of(model, word)))
    rel = abs(cyl.log_diam - direct) / abs(direct)
    _require(rel < 1e-9, f"log-diameter disagreement {rel:.2e}")
    return f"fold vs sum log-diameter agree to {rel:.1e} at length 1000"


def check_codec_luroth_series(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    val = codec.luroth_series_eval((2, 3), 2)
    _require(val == Fraction(2, 3), f"two-term series gave {val}")
    val10 = codec.luroth_series_eval((3,) * 10, 10)
    _require(abs(val10 - Fraction(2, 5)) < Fraction(1, 6) ** 9, "repeating-3 series drifted")
    word = codec.encode(model, Fraction(7, 10), 4, layout="classical")
    _require(tuple(word) == (1, 2, 2, 2), f"classical encoding of 7/10 gave {tuple(word)}")
    _, tx = codec.apply_expansion(model, Fraction(7, 10), layout="classical")
    _require(tx == Fraction(2, 5), f"classical step at 7/10 gave {tx}")
    _, fixed = codec.apply_expansion(model, Fraction(2, 5), layout="classical")
    _require(fixed == Fraction(2, 5), "2/5 is not fixed by the classical step")
    return "series evaluation and the classical fixed point at 2/5 verified"


# -- occupancy ----------------------------------------------------------------------

_PI_MINUS_3_PARTIAL_QUOTIENTS = (
    7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2, 1,
    84, 2, 1, 1, 15, 3, 13, 1, 4, 2,
)


def check_occupancy_counter(seed: int, threads: int) -> str:
    counter = occupancy.DistinctCounter()
    for d in (7, 15, 1, 292, 1, 1, 1, 2):
        count = counter.feed(d)
    _require(count == 5, f"eight-digit stream counted {count}, expected 5")
    counts = occupancy.distinct_counts(_PI_MINUS_3_PARTIAL_QUOTIENTS)
    _require(
        int(counts[-1]) == 10,
        f"30-term partial-quotient stream counted {counts[-1]}, expected 10",
    )
    diffs = np.diff(np.concatenate(([0], counts)))
    _require(
        diffs.min() >= 0 and diffs.max() <= 1, "distinct count must step by 0 or 1"
    )
    return "streaming counts match hand counts; increments in {0,1}"


def check_occupancy_expectation(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    _require(occupancy.expected_distinct(model, 1) == 1.0, "one draw occupies one box")
    k = np.arange(1, 200_001, dtype=np.float64)
    p = 1.0 / (k * (k + 1.0))
    brute = float(np.sum(-np.expm1(100 * np.log1p(-p)))) + 100.0 / 200_001.0
    fast = occupancy.expected_distinct(model, 100)
    _require(abs(fast - brute) < 1e-6, f"n=100 expectation {fast} vs brute {brute}")
    _require(abs(fast - 16.7577335464) < 1e-6, f"n=100 expectation {fast:.6f} not 16.757734")
    big = occupancy.expected_distinct(model, 10**6)
    root = math.sqrt(math.pi * 10**6)
    _require(root - 40 < big < root, f"n=1e6 expectation {big:.1f} outside bracket")
    return f"E D_100 = {fast:.4f}, E D_1e6 = {big:.2f} inside the leading-order bracket"


def check_occupancy_law_small(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    report = occupancy.monte_carlo_law(model, 10_000, 30, seed, threads=threads)
    exact = report.exact_expectations[-1]
    mean = report.mean_final_distinct
    se = report.sds[-1] * math.sqrt(10_000) / math.sqrt(report.trials)
    _require(
        abs(mean - exact) < 4 * se,
        f"mean {mean:.1f} vs exact {exact:.1f} beyond 4 se ({se:.2f})",
    )
    gaps = [abs(m - report.karlin) for m in report.means]
    _require(
        gaps[-1] == min(gaps), "final checkpoint is not the closest to the limit"
    )
    return f"n=1e4 law: mean {mean:.1f} vs exact {exact:.1f}, final checkpoint closest"


# -- linear construction -------------------------------------------------------------


def check_linear_count_formula(seed: int, threads: int) -> str:
    cells = 0
    for theta in (0.3, 0.5, 1.0):
        for N in range(1, 6):
            for L in range(1, 7):
                m = linear.distinctness_profile(theta, L).new_count
                if m > N:
                    continue
                cells += 1
                formula = linear.count_blocks(N, L, theta).exact
                listed = sum(1 for _ in linear.enumerate_blocks(N, L, theta))
                _require(
                    formula == listed,
                    f"(N={N}, L={L}, theta={theta}): {formula} != {listed}",
                )
    return f"count formula equals enumeration on {cells} feasible cells"


def check_linear_uniformity(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    sched = linear.build_block_schedule(model, 0.5, depth=3)
    for j in (1, 2, 3):
        lev = sched.level(j)
        alphabet = range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size)
        prefix = [sched.sample_block(i, substream(seed, 0xB10C, i)) for i in range(1, j)]
        total = 0.0
        for block in linear.enumerate_blocks(
            lev.alphabet_size, lev.length, 0.5, alphabet=alphabet
        ):
            word = np.concatenate(prefix + [np.asarray(block)]) if prefix else np.asarray(block)
            total += math.exp(sched.log_mass(word))
        expected = math.exp(sched.log_mass(np.concatenate(prefix))) if prefix else 1.0
        _require(
            abs(total - expected) < 1e-12,
            f"level {j} block masses sum to {total}, want {expected}",
        )
    return "level masses sum to the parent mass exactly (levels 1..3)"


def check_linear_sandwich(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    for theta in (0.3, 0.5, 1.0):
        sched = linear.build_block_schedule(model, theta, depth=8)
        for trial in range(3):
            word = sched.sample_word(8, substream(seed, 0x5A4D, int(theta * 10), trial))
            bad = linear.sandwich_violations(theta, word)
            _require(not bad, f"theta={theta} trial {trial}: violations at {bad[:5]}")
    return "theta*n <= D_n < theta*n + level holds exactly (3 rates, 3 seeds, depth 8)"


def check_linear_mass_additivity(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    sched = linear.build_block_schedule(model, 0.5, depth=2)
    word = sched.sample_word(1, substream(seed, 0xADD))
    base = math.exp(sched.log_mass(word))
    lev = sched.level(2)
    total = 0.0
    for d in range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size):
        try:
            total += math.exp(sched.log_mass(np.append(word, d)))
        except linear.NotInSupportError:
            continue
    _require(abs(total - base) < 1e-12, f"extensions sum to {total}, want {base}")
    return "one-step extension masses add up to the prefix mass"


def check_linear_local_dimension(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    sched = linear.build_block_schedule(model, 0.5, depth=10)
    rng_word = sched.sample_word(10, substream(seed, 0xD10))
    dims = [
        sched.local_dimension(rng_word[: sched.boundary(j)]) for j in range(4, 11)
    ]
    _require(all(d > 0 for d in dims), "local dimension must be positive")
    steps = [abs(b - a) for a, b in zip(dims, dims[1:])]
    _require(
        all(b < a for a, b in zip(steps, steps[1:])),
        f"local-dimension steps not shrinking: {steps}",
    )
    return f"local dimension stabilizes: depth-10 value {dims[-1]:.3f}"


# -- sublinear construction ----------------------------------------------------------


def check_sublinear_profiles(seed: int, threads: int) -> str:
    prof = sublinear.profile_from_spec({"kind": "sqrt", "horizon": 10_000})
    k = np.arange(10_001)
    _require(
        np.array_equal(prof.values, np.asarray([math.isqrt(int(v)) for v in k])),
        "sqrt profile must equal the integer square root exactly",
    )
    try:
        sublinear.make_admissible(lambda n: n / 2.0, 10_000)
    except NotAdmissibleError as exc:
        _require("decay clause" in str(exc), f"wrong clause named: {exc}")
    else:
        raise CheckFailure("linear growth accepted as admissible")
    return "sqrt profile exact; linear growth rejected naming the decay clause"


def check_sublinear_sandwich(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    prof = sublinear.profile_from_spec({"kind": "sqrt", "horizon": 20_000})
    for t in (0.5, 0.9):
        sched = sublinear.build_sublinear_schedule(model, prof, t)
        for K in np.unique(sched.K):
            resid = abs(float(np.sum(sched.sorted_weights[:K] ** sublinear.partial_sum_exponent_cached(sched, int(K)))) - 1.0)
            _require(resid < 1e-10, f"t={t}: tilt normalization residual {resid:.2e}")
        word = sched.sample_word(20_000, substream(seed, 0x5B, int(t * 10)))
        bad = sched.sandwich_violations(word)
        _require(not bad, f"t={t}: sandwich fails at positions {bad[:5]}")
    return "f(n) <= D_n <= f(n) + K_n exactly for t in {0.5, 0.9} at horizon 2e4"


def check_sublinear_ratio_decay(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    prof = sublinear.profile_from_spec({"kind": "sqrt", "horizon": 10_000})
    details = []
    for t in (0.5, 0.9):
        sched = sublinear.build_sublinear_schedule(model, prof, t)
        word = sched.sample_word(10_000, substream(seed, 0xDECA, int(t * 10)))
        trace = sched.ratio_trace(word).log_ratio
        early = float(trace[:5000].max())
        late = float(trace[5000:].max())
        _require(late < early, f"t={t}: late max {late:.2f} not below early {early:.2f}")
        details.append(f"t={t}: {early:.1f} -> {late:.1f}")
    return "log mass-to-diameter ratio drifts down (" + "; ".join(details) + ")"


# -- tilt ---------------------------------------------------------------------------


def check_tilt_lemma(seed: int, threads: int) -> str:
    rep = tilt.distinct_forces_large_check(6, 6)
    _require(rep.passed, f"counterexample {rep.counterexample}")
    return f"lemma holds on all {rep.tuples_checked} tuples (n<=6, values<=6)"


def check_tilt_change_of_measure(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    worst = 0.0
    for n in (2, 3, 4, 5):
        for s in (0.6, 0.75, 0.9):
            for theta in (0.4, 0.8, 1.0):
                rec = tilt.cylinder_sum_exact(model, n, s, theta, alphabet_cap=5)
                w = weights.weights_range(model, 1, 6) ** s
                z = float(w.sum())
                q = w / z
                qdp = {0: 1.0}
                for _ in range(n):
                    nxt: dict[int, float] = {}
                    for mask, val in qdp.items():
                        for kk in range(5):
                            nm = mask | (1 << kk)
                            nxt[nm] = nxt.get(nm, 0.0) + val * q[kk]
                    qdp = nxt
                thr = tilt.distinct_threshold(n, theta)
                prob = math.fsum(v for m, v in qdp.items() if m.bit_count() >= thr)
                lhs, rhs = rec.value, z**n * prob
                rel = abs(lhs - rhs) / max(rhs, 1e-300)
                worst = max(worst, rel)
                _require(rel < 1e-12, f"(n={n},s={s},theta={theta}): rel {rel:.2e}")
    return f"Z**n x tilted probability matches the direct sum (worst rel {worst:.1e})"


def check_tilt_monotonicity(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    for theta in (0.4, 0.8):
        vals = [
            tilt.cylinder_sum_exact(model, 4, s, theta, alphabet_cap=5).value
            for s in (0.6, 0.75, 0.9)
        ]
        _require(vals[0] >= vals[1] >= vals[2], f"sum increased in s at theta={theta}")
    for s in (0.6, 0.9):
        vals = [
            tilt.cylinder_sum_exact(model, 4, s, theta, alphabet_cap=5).value
            for theta in (0.4, 0.8, 1.0)
        ]
        _require(vals[0] >= vals[1] >= vals[2], f"sum increased in theta at s={s}")
    return "S_n nonincreasing in s and in theta on the exact grid"


def check_tilt_mc(seed: int, threads: int) -> str:
    model = weights.finite_model((0.5, 0.5))
    rec = tilt.cylinder_sum_mc(model, 4, 0.5, 1.0, trials=200_000, seed=seed)
    _require(
        abs(rec.value - 3.5) < 4 * (rec.stderr or 1e-9),
        f"uniform-pair estimate {rec.value:.4f} vs exact 3.5",
    )
    exact = tilt.cylinder_sum_exact(model, 4, 0.5, 1.0, alphabet_cap=2)
    _require(abs(exact.value - 3.5) < 1e-12, f"exact mode gave {exact.value}")
    return f"S_4(0.5, 1) on the fair pair: exact 3.5, MC {rec.value:.3f}"


def check_tilt_bound_chain(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rec = tilt.bound_chain(model, 40, 0.75, 0.5, trials=20_000, seed=seed)
    _require(rec.chain_ok is True, "MC probability exceeded the binomial bound")
    return (
        f"n=40: P_mc={rec.prob_mc:.3f} below bound exp({min(rec.log_binomial_bound, 0.0):.2f})"
    )


# -- rng ----------------------------------------------------------------------------


def check_rng_reproducibility(seed: int, threads: int) -> str:
    a = substream(seed, 1, 2).random(8)
    b = substream(seed, 1, 2).random(8)
    c = substream(seed, 1, 3).random(8)
    _require(np.array_equal(a, b), "same substream path must replay identically")
    _require(not np.array_equal(a, c), "distinct substream paths must differ")
    return "substreams replay bit-identically and are path-separated"


# -- full-tier (acceptance-grade) -----------------------------------------------------


def check_full_occupancy_law(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    report = occupancy.monte_carlo_law(model, 10**6, 100, seed, threads=threads)
    mean_ratio = report.means[-1]
    _require(
        math.sqrt(math.pi) - 0.06 < mean_ratio < math.sqrt(math.pi) + 0.06,
        f"limit-law mean {mean_ratio:.4f} outside sqrt(pi) +/- 0.06",
    )
    exact = report.exact_expectations[-1]
    _require(
        abs(report.mean_final_distinct - exact) / exact < 0.01,
        f"MC mean {report.mean_final_distinct:.1f} off exact {exact:.1f} by >1%",
    )
    return f"n=1e6, 100 trials: mean ratio {mean_ratio:.4f} vs sqrt(pi)={math.sqrt(math.pi):.4f}"


def check_full_power_law(seed: int, threads: int) -> str:
    model = weights.power_model(3.0)
    report = occupancy.monte_carlo_law(model, 10**6, 50, seed, threads=threads)
    exact = report.exact_expectations[-1]
    _require(
        abs(report.mean_final_distinct - exact) / exact < 0.01,
        f"MC mean {report.mean_final_distinct:.2f} off exact {exact:.2f} by >1%",
    )
    gaps = [abs(m - report.karlin) for m in report.means]
    _require(gaps[-1] == min(gaps), "final checkpoint not closest to the limit")
    return f"rho=3: MC mean {report.mean_final_distinct:.1f} vs exact {exact:.1f}"


def check_full_linear_sandwich(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    for theta in (0.3, 0.5, 1.0):
        sched = linear.build_block_schedule(model, theta, depth=14)
        for trial in range(10):
            word = sched.sample_word(14, substream(seed, 0xA3, int(theta * 10), trial))
            bad = linear.sandwich_violations(theta, word)
            _require(not bad, f"theta={theta} trial {trial}: violation at {bad[:3]}")
    return "depth-14 sandwich exact for theta in {0.3, 0.5, 1} x 10 seeds"


def check_full_local_dimension(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    sched = linear.build_block_schedule(model, 0.5, depth=14)
    word = sched.sample_word(14, substream(seed, 0xA5))
    d14 = sched.local_dimension(word)
    d6 = sched.local_dimension(word[: sched.boundary(6)])
    _require(0.40 <= d14 <= 0.60, f"depth-14 estimate {d14:.3f} outside [0.40, 0.60]")
    _require(
        abs(d14 - 0.5) < abs(d6 - 0.5),
        f"depth-14 ({d14:.3f}) not closer to 0.5 than depth-6 ({d6:.3f})",
    )
    return f"local dimension {d6:.3f} (depth 6) -> {d14:.3f} (depth 14), target 0.5"


def check_full_change_of_measure(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    rec = tilt.cylinder_sum_exact(model, 6, 0.75, 0.8, alphabet_cap=6)
    mc = tilt.cylinder_sum_mc(model, 6, 0.75, 0.8, trials=10**6, seed=seed)
    gap = abs(mc.value - rec.value)
    allowance = 3 * (mc.stderr or 0.0) + (rec.truncation_deficit or 0.0)
    _require(
        gap <= allowance,
        f"MC {mc.value:.4f} vs exact {rec.value:.4f}: gap {gap:.4f} > {allowance:.4f}",
    )
    return f"n=6 MC within 3 se + truncation bracket of the exact sum ({mc.value:.3f})"


def check_full_tail_ratio(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    ratios = []
    for M in (10, 100, 1000, 10_000):
        val = weights.tilted_tail_sum(model, M, 0.75) * math.sqrt(M)
        _require(1.5 <= val <= 3.0, f"M={M}: scaled tail {val:.3f} outside [1.5, 3]")
        ratios.append(f"{val:.3f}")
    return "scaled tilted tails at M=1e1..1e4: " + ", ".join(ratios)


def check_full_sublinear(seed: int, threads: int) -> str:
    model = weights.luroth_model()
    prof = sublinear.profile_from_spec({"kind": "sqrt", "horizon": 10**5})
    for t in (0.5, 0.9):
        sched = sublinear.build_sublinear_schedule(model, prof, t)
        for trial in range(5):
            word = sched.sample_word(10**5, substream(seed, 0xA8, int(t * 10), trial))
            bad = sched.sandwich_violations(word)
            _require(not bad, f"t={t} trial {trial}: sandwich fails at {bad[:3]}")
            trace = sched.ratio_trace(word).log_ratio
            early = float(trace[: 50_000].max())
            late = float(trace[50_000:].max())
            _require(
                late < early,
                f"t={t} trial {trial}: late max {late:.2f} >= early {early:.2f}",
            )
    return "horizon-1e5 sandwich exact and ratio maxima strictly decay (2 t x 5 seeds)"


_QUICK_CHECKS = [
    ("weights-normalization", check_weights_normalization),
    ("weights-tilt-monotone", check_weights_tilt_monotone),
    ("weights-exponent-solver", check_weights_exponent_solver),
    ("weights-potter-scan", check_weights_potter),
    ("weights-sampler-law", check_weights_sampler_law),
    ("codec-roundtrip", check_codec_roundtrip),
    ("codec-partition", check_codec_partition),
    ("codec-diameter", check_codec_diameter),
    ("codec-luroth-series", check_codec_luroth_series),
    ("occupancy-counter", check_occupancy_counter),
    ("occupancy-expectation", check_occupancy_expectation),
    ("occupancy-law-small", check_occupancy_law_small),
    ("linear-count-formula", check_linear_count_formula),
    ("linear-uniformity", check_linear_uniformity),
    ("linear-sandwich", check_linear_sandwich),
    ("linear-mass-additivity", check_linear_mass_additivity),
    ("linear-local-dimension", check_linear_local_dimension),
    ("sublinear-profiles", check_sublinear_profiles),
    ("sublinear-sandwich", check_sublinear_sandwich),
    ("sublinear-ratio-decay", check_sublinear_ratio_decay),
    ("tilt-lemma", check_tilt_lemma),
    ("tilt-change-of-measure", check_tilt_change_of_measure),
    ("tilt-monotonicity", check_tilt_monotonicity),
    ("tilt-mc", check_tilt_mc),
    ("tilt-bound-chain", check_tilt_bound_chain),
    ("rng-reproducibility", check_rng_reproducibility),
]

_FULL_CHECKS = [
    ("full-occupancy-law", check_full_occupancy_law),
    ("full-power-law", check_full_power_law),
    ("full-linear-sandwich", check_full_linear_sandwich),
    ("full-local-dimension", check_full_local_dimension),
    ("full-change-of-measure", check_full_change_of_measure),
    ("full-tail-ratio", check_full_tail_ratio),
    ("full-sublinear", check_full_sublinear),
]


def _fail_injected(seed: int, threads: int) -> str:
    raise CheckFailure("injected failure (harness self-test)")


def check_names(tier: str = "quick") -> list[str]:
    names = [name for name, _ in _QUICK_CHECKS]
    if tier == "full":
        names += [name for name, _ in _FULL_CHECKS]
    return names


def run_suite(
    tier: str = "quick",
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    fail_inject: bool = False,
) -> VerifyReport:
    if tier not in ("quick", "full"):
        raise ValueError(f"unknown verification tier {tier!r}")
    checks = list(_QUICK_CHECKS)
    if tier == "full":
        checks += _FULL_CHECKS
    if fail_inject:
        checks = checks + [("fail-inject", _fail_injected)]
    results = []
    for name, fn in checks:
        start = time.perf_counter()
        try:
            detail = fn(seed, threads)
            passed = True
        except CheckFailure as exc:
            detail = f"{exc} [reproduce with seed={seed}]"
            passed = False
        elapsed = time.perf_counter() - start
        results.append(
            CheckResult(name=name, passed=passed, seconds=elapsed, detail=detail)
        )
    return VerifyReport(tier=tier, seed=seed, results=tuple(results))
