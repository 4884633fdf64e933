"""Forced-digit construction hitting a prescribed sublinear distinct rate.

An admissible growth profile ``f`` is integer valued, starts at 0, climbs
by steps of 0 or 1, is unbounded, and satisfies ``f(n) log f(n) / n -> 0``.
At the times where ``f`` steps up, the word is *forced* to use the fresh
digit ``K_n + f(n)``; everywhere else it draws a *free* digit from
``{1..K_n}`` with law ``p_k**s`` for the exponent ``s = s(K_n)`` that makes
those powers sum to one.  ``K_n = max(K*, floor(sqrt(f(n))))`` where ``K*``
is the smallest truncation whose exponent reaches ``(1+t)/2``; forced
digits therefore always exceed every available free digit, the distinct
count is sandwiched between ``f(n)`` and ``f(n) + K_n``, and the mass ratio
``mu_t(C_n) / diam(C_n)**t`` decays geometrically.

Weights are used in non-increasing order inside this module: when a model
is not already sorted the sorting permutation is recorded on the schedule
(digit labels in emitted words refer to the sorted order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    NotAdmissibleError,
    NotInSupportError,
    PrecisionError,
    TiltThresholdError,
)
from .occupancy import distinct_counts
from .weights import WeightModel, partial_sum_exponent, weights_range

__all__ = [
    "AdmissibleProfile",
    "SublinearSchedule",
    "RatioTrace",
    "make_admissible",
    "profile_from_table",
    "profile_from_spec",
    "threshold_index",
    "build_sublinear_schedule",
]


@dataclass(frozen=True, eq=False)
class AdmissibleProfile:
    """Validated growth profile ``f(0..horizon)`` (integer valued)."""

    values: np.ndarray  # int64, values[0] == 0
    horizon: int
    provenance: str

    def f(self, n: int) -> int:
        if not 0 <= n <= self.horizon:
            raise DomainError(f"n={n} outside profile horizon {self.horizon}")
        return int(self.values[n])

    def step_times(self) -> np.ndarray:
        """The times at which ``f`` increments (sorted, 1-based)."""
        return np.nonzero(np.diff(self.values) == 1)[0] + 1


def make_admissible(g: Callable[[int], float], horizon: int, provenance: str = "user") -> AdmissibleProfile:
    """Slope-limit ``floor(g)`` into an admissible profile and validate it.

    ``f(n) = min(f(n-1) + 1, floor(g(n)))`` with ``f(0) = 0``; ``g`` must be
    nondecreasing on the horizon.  Violated admissibility clauses raise
    :class:`NotAdmissibleError` naming the clause.
    """
    if horizon < 10:
        raise DomainError("profile horizon must be at least 10")
    values = np.zeros(horizon + 1, dtype=np.int64)
    prev_g = -math.inf
    for n in range(1, horizon + 1):
        gn = float(g(n))
        if gn < prev_g - 1e-9:
            raise DomainError(f"profile generator decreases at n={n}")
        prev_g = gn
        values[n] = min(values[n - 1] + 1, math.floor(gn))
        if values[n] < 0:
            values[n] = max(values[n], 0)
    return _validate_profile(values, horizon, provenance)


def profile_from_table(table, provenance: str = "user-table") -> AdmissibleProfile:
    """Validate an explicit table ``f(0), f(1), ..., f(horizon)``."""
    values = np.asarray(list(table), dtype=np.int64)
    if values.size < 11:
        raise DomainError("profile table must cover n = 0..10 at least")
    return _validate_profile(values, values.size - 1, provenance)


def _validate_profile(values: np.ndarray, horizon: int, provenance: str) -> AdmissibleProfile:
    if values[0] != 0:
        raise NotAdmissibleError("start clause violated: f(0) must be 0")
    steps = np.diff(values)
    if steps.size and (steps.min() < 0 or steps.max() > 1):
        raise NotAdmissibleError(
            "increment clause violated: f must climb by steps of 0 or 1"
        )
    if values[horizon] <= values[1]:
        raise NotAdmissibleError(
            "growth clause violated: f(horizon) must exceed f(1)"
        )

    def decay(n: int) -> float:
        fn = float(values[n])
        return fn * math.log(fn) / n if fn > 1.0 else 0.0

    n0 = max(1, horizon // 10)
    n1 = max(n0 + 1, int(math.sqrt(n0 * horizon)))
    h0, h1, h2 = decay(n0), decay(n1), decay(horizon)
    # 2% slack absorbs the sawtooth of floor-valued profiles
    if not (h1 <= h0 * 1.02 and h2 <= h1 * 1.02 and h2 < h0):
        raise NotAdmissibleError(
            "decay clause violated: f(n) log f(n) / n must decrease "
            "toward 0 over the last decade of the horizon"
        )
    values = values.copy()
    values.flags.writeable = False
    return AdmissibleProfile(values=values, horizon=horizon, provenance=provenance)


def profile_from_spec(spec: dict) -> AdmissibleProfile:
    """Wire form: ``{kind: sqrt|power|log|table, beta?, c?, table?, horizon}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("profile spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "table":
        table = spec.get("table")
        if not isinstance(table, (list, tuple)):
            raise DomainError("table profile needs a 'table' array")
        return profile_from_table(table)
    horizon = spec.get("horizon")
    if not isinstance(horizon, int) or horizon < 10:
        raise DomainError("profile spec needs an integer horizon >= 10")
    if kind == "sqrt":
        return make_admissible(lambda n: math.isqrt(n), horizon, "builtin-sqrt")
    if kind == "log":
        return make_admissible(lambda n: math.log(n + 1.0), horizon, "builtin-log")
    if kind == "power":
        beta = spec.get("beta")
        c = spec.get("c", 1.0)
        if not isinstance(beta, (int, float)) or not 0.0 < float(beta) < 1.0:
            raise DomainError("power profile needs beta in (0, 1)")
        if not isinstance(c, (int, float)) or not float(c) > 0.0:
            raise DomainError("power profile needs c > 0")
        return make_admissible(
            lambda n: float(c) * n ** float(beta), horizon, f"builtin-power({beta},{c})"
        )
    raise DomainError(f"unknown profile kind {kind!r}")


def threshold_index(model: WeightModel, t: float, cap: int = 1 << 20) -> int:
    """Smallest ``K`` with ``partial_sum_exponent(K) >= (1 + t) / 2``."""
    if not 0.0 < t < 1.0:
        raise DomainError("dimension target t must lie in (0, 1)")
    target = 0.5 * (1.0 + t)
    lo, hi = 1, 2
    while partial_sum_exponent(model, hi) < target:
        lo = hi
        hi *= 2
        if hi > cap:
            raise TiltThresholdError(
                f"no truncation below {cap} reaches exponent {target:g}"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if partial_sum_exponent(model, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class RatioTrace:
    """Per-position decomposition of ``log(mu_t(C_n) / diam(C_n)**t)``."""

    log_ratio: np.ndarray
    free_part: np.ndarray  # cumulative (s_i - t) log p at free times
    forced_part: np.ndarray  # cumulative -t log p at forced times


@dataclass(frozen=True, eq=False)
class SublinearSchedule:
    """Forced/free digit plan for one (profile, t, model) triple."""

    model: WeightModel
    profile: AdmissibleProfile
    t: float
    k_star: int
    n_t: int | None  # first n with K_n <= sqrt(f(n)), None if past horizon
    K: np.ndarray  # int64, K_n for n = 1..horizon (index n-1)
    s_of_n: np.ndarray  # float, s(K_n)
    forced_time: np.ndarray  # bool
    forced_digit: np.ndarray  # int64, b_n at forced times, 0 elsewhere
    sorted_weights: np.ndarray  # non-increasing weight table, index = label - 1
    label_permutation: np.ndarray | None  # sorted label -> model digit, or None
    _samplers: dict = field(default_factory=dict, repr=False)

    @property
    def horizon(self) -> int:
        return self.profile.horizon

    def to_model_digits(self, word) -> np.ndarray:
        """Map sorted-order labels back to the model's own digit indices."""
        word = np.asarray(word, dtype=np.int64)
        if self.label_permutation is None:
            return word.copy()
        return self.label_permutation[word - 1]

    # -- sampling ---------------------------------------------------------------

    def sample_word(self, n_max: int, rng: np.random.Generator) -> np.ndarray:
        """Draw the first ``n_max`` digits under the product law."""
        if not 1 <= n_max <= self.horizon:
            raise DomainError("n_max outside the profile horizon")
        word = np.zeros(n_max, dtype=np.int64)
        forced = self.forced_time[:n_max]
        word[forced] = self.forced_digit[:n_max][forced]
        free_idx = np.nonzero(~forced)[0]
        u = rng.random(free_idx.size)
        ks = self.K[free_idx]
        for kv in np.unique(ks):
            cum = self._free_cumulative(int(kv))
            pick = ks == kv
            word[free_idx[pick]] = np.searchsorted(cum, u[pick], side="right") + 1
        return word

    def _free_cumulative(self, K: int) -> np.ndarray:
        cum = self._samplers.get(K)
        if cum is None:
            s = partial_sum_exponent_cached(self, K)
            cum = np.cumsum(self.sorted_weights[:K] ** s)
            self._samplers[K] = cum
        return cum

    # -- measure ----------------------------------------------------------------

    def log_mass(self, word) -> float:
        """Log product-measure mass of the cylinder at ``word``.

        Forced positions contribute factor one after validation; free
        positions contribute ``s_n log p_d``.
        """
        digits = self._validate(word)
        n = digits.size
        forced = self.forced_time[:n]
        free = ~forced
        logp = np.log(self.sorted_weights[digits[free] - 1])
        return float(np.sum(self.s_of_n[:n][free] * logp))

    def ratio_trace(self, word) -> RatioTrace:
        digits = self._validate(word)
        n = digits.size
        forced = self.forced_time[:n]
        logp = np.log(self.sorted_weights[digits - 1])
        free_steps = np.where(forced, 0.0, (self.s_of_n[:n] - self.t) * logp)
        forced_steps = np.where(forced, -self.t * logp, 0.0)
        free_part = np.cumsum(free_steps)
        forced_part = np.cumsum(forced_steps)
        return RatioTrace(
            log_ratio=free_part + forced_part,
            free_part=free_part,
            forced_part=forced_part,
        )

    def sandwich_violations(self, word) -> list[int]:
        """Positions where ``f(n) <= D_n <= f(n) + K_n`` fails (exact)."""
        digits = np.asarray(word, dtype=np.int64)
        counts = distinct_counts(digits)
        f = self.profile.values[1 : digits.size + 1]
        ok = (f <= counts) & (counts <= f + self.K[: digits.size])
        return [int(i) + 1 for i in np.nonzero(~ok)[0]]

    def _validate(self, word) -> np.ndarray:
        digits = np.asarray(word, dtype=np.int64)
        if digits.size > self.horizon:
            raise DomainError("word longer than the profile horizon")
        if digits.size and digits.min() < 1:
            raise DomainError("digits must be positive")
        n = digits.size
        forced = self.forced_time[:n]
        if not np.array_equal(digits[forced], self.forced_digit[:n][forced]):
            raise NotInSupportError("a forced position carries the wrong digit")
        free_digits = digits[~forced]
        if free_digits.size and (free_digits > self.K[:n][~forced]).any():
            raise NotInSupportError("a free digit exceeds its truncation bound")
        return digits


def partial_sum_exponent_cached(sched: SublinearSchedule, K: int) -> float:
    key = ("s", K)
    val = sched._samplers.get(key)
    if val is None:
        val = _sorted_exponent(sched.sorted_weights, K)
        sched._samplers[key] = val
    return val


def _sorted_exponent(sorted_weights: np.ndarray, K: int) -> float:
    """Root of ``sum_{k<=K} p_k**s = 1`` over an explicit sorted table."""
    if K == 1:
        return 0.0
    logp = np.log(sorted_weights[:K])

    def excess(sv: float) -> float:
        return float(np.exp(sv * logp).sum()) - 1.0

    lo, hi = 0.0, 1.0
    flo = float(K - 1)
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0.0:
            lo, flo = mid, excess(mid)
        else:
            hi = mid
    fhi = excess(hi)
    if flo != fhi:
        return min(max(lo - flo * (hi - lo) / (fhi - flo), 0.0), 1.0)
    return lo


def build_sublinear_schedule(
    model: WeightModel, profile: AdmissibleProfile, t: float
) -> SublinearSchedule:
    """Assemble the forced/free plan for dimension target ``t`` in (0, 1)."""
    if not 0.0 < t < 1.0:
        raise DomainError("dimension target t must lie in (0, 1)")
    horizon = profile.horizon
    f = profile.values
    k_star = threshold_index(model, t)
    root_f = np.asarray([math.isqrt(int(v)) for v in f[1:]], dtype=np.int64)
    K = np.maximum(k_star, root_f)
    forced_time = np.zeros(horizon, dtype=bool)
    forced_time[profile.step_times() - 1] = True
    forced_digit = np.where(forced_time, K + f[1:], 0).astype(np.int64)
    reach = np.nonzero(root_f >= k_star)[0]
    n_t = int(reach[0]) + 1 if reach.size else None
    forced_vals = forced_digit[forced_time]
    assert np.all(np.diff(K) >= 0), "truncation bounds must be nondecreasing"
    assert forced_vals.size == 0 or np.all(np.diff(forced_vals) > 0), (
        "forced digits must strictly increase along the new-digit times"
    )
    kmax = int(max(K.max(), forced_digit.max()))
    sorted_weights, perm = _sorted_weight_table(model, kmax)
    s_lookup = {int(kv): _sorted_exponent(sorted_weights, int(kv)) for kv in np.unique(K)}
    s_arr = np.asarray([s_lookup[int(kv)] for kv in K])
    for arr in (K, forced_time, forced_digit, s_arr, sorted_weights):
        arr.flags.writeable = False
    return SublinearSchedule(
        model=model,
        profile=profile,
        t=float(t),
        k_star=k_star,
        n_t=n_t,
        K=K,
        s_of_n=s_arr,
        forced_time=forced_time,
        forced_digit=forced_digit,
        sorted_weights=sorted_weights,
        label_permutation=perm,
    )


def _non_increasing(p: np.ndarray) -> bool:
    return bool(np.all(np.diff(p) <= 0.0))


def _sorted_weight_table(model: WeightModel, kmax: int):
    """Weight table in non-increasing order plus the label permutation.

    Returns ``(table, None)`` when the model is already sorted, otherwise
    ``(table, perm)`` with ``perm[label - 1]`` the model digit the sorted
    label refers to.  The search window grows until the settled tail can
    no longer push a weight into the first ``kmax`` slots.
    """
    if model.support_size is not None:
        n = model.support_size
        if kmax > n:
            raise DomainError(
                "construction needs more digits than the finite support offers"
            )
        p = weights_range(model, 1, n + 1)
        if _non_increasing(p[:kmax]) and (n == kmax or p[kmax:].max() <= p[kmax - 1]):
            return p[:kmax].copy(), None
        order = np.argsort(-p, kind="stable")
        return p[order[:kmax]].copy(), (order[:kmax] + 1).astype(np.int64)
    prefix_len = len(model.prefix) if model.prefix is not None else 0
    ext = max(4 * kmax + 64, 2 * prefix_len + kmax)
    while True:
        p = weights_range(model, 1, ext + 1)
        tail = p[ext // 2 :]
        if _non_increasing(tail):
            if _non_increasing(p):
                return p[:kmax].copy(), None
            order = np.argsort(-p, kind="stable")
            sorted_p = p[order]
            if sorted_p[kmax - 1] >= tail[0]:
                if np.array_equal(order[:kmax], np.arange(kmax)):
                    return sorted_p[:kmax].copy(), None
                perm = (order[:kmax] + 1).astype(np.int64)
                return sorted_p[:kmax].copy(), perm
        if ext > 1 << 26:
            raise PrecisionError(
                "weight ordering did not settle within the search window"
            )
        ext *= 4
