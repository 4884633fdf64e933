"""Digit-weight models with regularly varying tails.

A weight model is a probability sequence ``p_1, p_2, ...`` over the positive
integers together with a declared tail index ``rho`` and a closed-form slowly
varying factor ``L`` such that ``p_k = k**-rho * L(k)`` holds exactly beyond
any explicit prefix.  Built-in families:

* ``luroth``          -- ``p_k = 1/(k(k+1))``, ``rho = 2``, ``L(k) = k/(k+1)``
* ``power``           -- ``p_k = k**-rho / zeta(rho)``, ``rho > 1``
* ``power-log``       -- ``p_k`` proportional to ``k**-rho * log(k+1)**gamma``
* ``explicit-prefix`` -- finitely many explicit weights, power tail beyond
* ``finite``          -- an explicit finite distribution (for enumeration
  tests; it has no regularly varying tail and reports ``rho = inf``)

This module owns every scalar quantity derived from the weights: tail sums,
tilted tail sums ``sum_{k>=M} p_k**s``, the exponent at which a truncated
s-power sum equals one, empirical dyadic-ratio (Potter-type) constants, and
inverse-CDF digit sampling.

Slowly decaying tails are summed with a short explicit head plus an
Euler-Maclaurin corrected integral remainder, which keeps every tail sum at
better than 1e-10 relative accuracy without million-term loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaincc as _gammaincc
from scipy.special import zeta as _hurwitz_zeta

from .errors import (
    DivergenceError,
    DomainError,
    HorizonExceededError,
    TiltThresholdError,
)

__all__ = [
    "WeightModel",
    "PotterReport",
    "luroth_model",
    "power_model",
    "power_log_model",
    "explicit_prefix_model",
    "finite_model",
    "model_from_spec",
    "model_to_spec",
    "weight",
    "log_weight",
    "weights_range",
    "slowly_varying",
    "tail_sum",
    "tilted_tail_sum",
    "partial_sum_exponent",
    "potter_scan",
    "verify_potter_report",
    "sample_digit",
    "DigitSampler",
]

_KINDS = ("luroth", "power", "power-log", "explicit-prefix", "finite")

# Explicit-head length before switching to the integral remainder.  Beyond
# this index the Euler-Maclaurin correction error is below 1e-12 relative
# for every exponent the library accepts.
_EM_CUT = 8192


@dataclass(frozen=True)
class WeightModel:
    """Immutable description of a digit-weight sequence.

    ``rho`` is the declared tail index; ``gamma`` only applies to the
    ``power-log`` kind; ``prefix`` to ``explicit-prefix``; ``probs`` to
    ``finite``.  ``digit_count_hint`` bounds default sampler tables.
    """

    kind: str
    rho: float
    gamma: float = 0.0
    prefix: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    digit_count_hint: int | None = None
    # Normalizer, meaning depends on kind: zeta(rho) for power, the full
    # weighted zeta sum for power-log, the tail coefficient c for
    # explicit-prefix.  Computed once at construction.
    _norm: float = field(default=1.0, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown weight-model kind {self.kind!r}")
        if self.kind == "luroth":
            if self.rho != 2.0:
                raise DomainError("luroth weights have tail index 2")
        elif self.kind in ("power", "power-log"):
            if not self.rho > 1.0:
                raise DomainError("power-type weights need rho > 1")
        elif self.kind == "explicit-prefix":
            if not self.rho > 1.0:
                raise DomainError("explicit-prefix tail needs rho > 1")
            if not self.prefix:
                raise DomainError("explicit-prefix needs at least one entry")
            if any(q <= 0.0 for q in self.prefix):
                raise DomainError("prefix weights must be positive")
            if sum(self.prefix) >= 1.0:
                raise DomainError("prefix weights must sum to less than 1")
        elif self.kind == "finite":
            if not self.probs or any(q <= 0.0 for q in self.probs):
                raise DomainError("finite model needs positive probabilities")
            if abs(sum(self.probs) - 1.0) > 1e-12:
                raise DomainError("finite model probabilities must sum to 1")
        object.__setattr__(self, "_norm", _compute_norm(self))

    # -- descriptive helpers -------------------------------------------------

    @property
    def support_size(self) -> int | None:
        """Number of digits with positive weight (None = countably infinite)."""
        return len(self.probs) if self.kind == "finite" else None

    @property
    def power_constant(self) -> float | None:
        """The constant ``C = lim_k p_k * k**rho`` when the limit exists."""
        if self.kind == "luroth":
            return 1.0
        if self.kind == "power":
            return 1.0 / self._norm
        if self.kind == "explicit-prefix":
            return self._norm
        if self.kind == "power-log" and self.gamma == 0.0:
            return 1.0 / self._norm
        return None

    def describe(self) -> str:
        if self.kind == "power":
            return f"power(rho={self.rho:g})"
        if self.kind == "power-log":
            return f"power-log(rho={self.rho:g}, gamma={self.gamma:g})"
        if self.kind == "explicit-prefix":
            return f"explicit-prefix({len(self.prefix)} entries, rho={self.rho:g})"
        if self.kind == "finite":
            return f"finite({len(self.probs)} symbols)"
        return "luroth"


def _compute_norm(model: WeightModel) -> float:
    if model.kind == "power":
        return float(_hurwitz_zeta(model.rho, 1))
    if model.kind == "power-log":
        return _powerlog_raw_tail(1, model.rho, model.gamma)
    if model.kind == "explicit-prefix":
        m = len(model.prefix)
        remaining = 1.0 - sum(model.prefix)
        return remaining / float(_hurwitz_zeta(model.rho, m + 1))
    return 1.0


# -- constructors -----------------------------------------------------------


def luroth_model() -> WeightModel:
    """The alternating-harmonic partition ``p_k = 1/(k(k+1))``."""
    return WeightModel(kind="luroth", rho=2.0)


def power_model(rho: float) -> WeightModel:
    """Zeta-normalized pure power weights ``p_k = k**-rho / zeta(rho)``."""
    return WeightModel(kind="power", rho=float(rho))


def power_log_model(rho: float, gamma: float) -> WeightModel:
    """Power weights with a logarithmic slowly varying factor."""
    return WeightModel(kind="power-log", rho=float(rho), gamma=float(gamma))


def explicit_prefix_model(prefix, rho: float) -> WeightModel:
    """Explicit head probabilities, power tail carrying the leftover mass."""
    return WeightModel(
        kind="explicit-prefix",
        rho=float(rho),
        prefix=tuple(float(q) for q in prefix),
    )


def finite_model(probs) -> WeightModel:
    """Explicit finite distribution.  Used by enumeration tests."""
    return WeightModel(
        kind="finite", rho=math.inf, probs=tuple(float(q) for q in probs)
    )


def model_from_spec(spec: dict) -> WeightModel:
    """Build a model from its wire-format dictionary."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("model spec must be an object with a 'kind' field")
    kind = spec["kind"]
    known = {"kind", "rho", "gamma", "prefix"}
    extra = set(spec) - known
    if extra:
        raise DomainError(f"unknown model spec fields: {sorted(extra)}")
    if kind == "luroth":
        return luroth_model()
    if kind == "power":
        return power_model(_require_number(spec, "rho"))
    if kind == "power-log":
        return power_log_model(_require_number(spec, "rho"), _require_number(spec, "gamma"))
    if kind == "explicit-prefix":
        prefix = spec.get("prefix")
        if not isinstance(prefix, (list, tuple)):
            raise DomainError("explicit-prefix spec needs a 'prefix' array")
        return explicit_prefix_model(prefix, _require_number(spec, "rho"))
    raise DomainError(f"unknown weight-model kind {kind!r}")


def model_to_spec(model: WeightModel) -> dict:
    """Inverse of :func:`model_from_spec` (built-in kinds only)."""
    if model.kind == "luroth":
        return {"kind": "luroth", "rho": 2}
    if model.kind == "power":
        return {"kind": "power", "rho": model.rho}
    if model.kind == "power-log":
        return {"kind": "power-log", "rho": model.rho, "gamma": model.gamma}
    if model.kind == "explicit-prefix":
        return {"kind": "explicit-prefix", "rho": model.rho, "prefix": list(model.prefix)}
    raise DomainError(f"kind {model.kind!r} has no wire format")


def _require_number(spec: dict, key: str) -> float:
    value = spec.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DomainError(f"model spec field {key!r} must be a number")
    return float(value)


# -- pointwise weights ------------------------------------------------------


def weight(model: WeightModel, k: int) -> float:
    """``p_k``.  Digits are indexed from 1."""
    k = _check_digit(model, k)
    if model.kind == "luroth":
        return 1.0 / (k * (k + 1.0))
    if model.kind == "power":
        return k ** -model.rho / model._norm
    if model.kind == "power-log":
        return k ** -model.rho * math.log(k + 1.0) ** model.gamma / model._norm
    if model.kind == "explicit-prefix":
        if k <= len(model.prefix):
            return model.prefix[k - 1]
        return model._norm * k ** -model.rho
    return model.probs[k - 1]


def log_weight(model: WeightModel, k: int) -> float:
    """``log p_k``, stable for digits far beyond float overflow of ``1/p_k``."""
    k = _check_digit(model, k)
    if model.kind == "luroth":
        return -math.log(k) - math.log(k + 1.0)
    if model.kind == "power":
        return -model.rho * math.log(k) - math.log(model._norm)
    if model.kind == "power-log":
        return (
            -model.rho * math.log(k)
            + model.gamma * math.log(math.log(k + 1.0))
            - math.log(model._norm)
        )
    if model.kind == "explicit-prefix":
        if k <= len(model.prefix):
            return math.log(model.prefix[k - 1])
        return math.log(model._norm) - model.rho * math.log(k)
    return math.log(model.probs[k - 1])


def _check_digit(model: WeightModel, k) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise DomainError(f"digit index must be a positive integer, got {k!r}")
    if model.kind == "finite" and k > len(model.probs):
        raise DomainError(
            f"digit {k} outside finite support of size {len(model.probs)}"
        )
    return int(k)


def weights_range(model: WeightModel, lo: int, hi: int) -> np.ndarray:
    """Vector of ``p_k`` for ``k`` in ``[lo, hi)``."""
    if lo < 1 or hi < lo:
        raise DomainError("need 1 <= lo <= hi")
    k = np.arange(lo, hi, dtype=np.float64)
    if model.kind == "luroth":
        return 1.0 / (k * (k + 1.0))
    if model.kind == "power":
        return k ** -model.rho / model._norm
    if model.kind == "power-log":
        return k ** -model.rho * np.log(k + 1.0) ** model.gamma / model._norm
    if model.kind == "explicit-prefix":
        out = model._norm * k ** -model.rho
        m = len(model.prefix)
        head = np.asarray(model.prefix[lo - 1 : hi - 1], dtype=np.float64)
        out[: head.size] = head
        return out
    if hi - 1 > len(model.probs):
        raise DomainError("range exceeds finite support")
    return np.asarray(model.probs[lo - 1 : hi - 1], dtype=np.float64)


@lru_cache(maxsize=64)
def _weights_prefix(model: WeightModel, n: int) -> np.ndarray:
    out = weights_range(model, 1, n + 1)
    out.flags.writeable = False
    return out


def log_weights_of(model: WeightModel, word: np.ndarray) -> np.ndarray:
    """``log p_d`` for every digit of ``word`` (vectorized)."""
    d = np.asarray(word, dtype=np.int64)
    if d.size and d.min() < 1:
        raise DomainError("digits must be positive")
    if model.kind == "luroth":
        df = d.astype(np.float64)
        return -np.log(df) - np.log(df + 1.0)
    if model.kind == "finite" and d.size and d.max() > len(model.probs):
        raise DomainError("digit outside finite support")
    kmax = int(d.max()) if d.size else 1
    if kmax <= 1 << 22:
        table = np.log(_weights_prefix(model, kmax))
        return table[d - 1]
    return np.array([log_weight(model, int(k)) for k in d], dtype=np.float64)


def slowly_varying(model: WeightModel, k: int) -> float:
    """The declared slowly varying factor ``L(k)`` with ``p_k = k**-rho L(k)``."""
    k = _check_digit(model, k)
    if model.kind == "luroth":
        return k / (k + 1.0)
    if model.kind == "power":
        return 1.0 / model._norm
    if model.kind == "power-log":
        return math.log(k + 1.0) ** model.gamma / model._norm
    if model.kind == "explicit-prefix":
        return model._norm
    raise DomainError("finite models have no regularly varying tail")


# -- tail sums ---------------------------------------------------------------


def tail_sum(model: WeightModel, M: int) -> float:
    """``sum_{k>=M} p_k``; equals 1 at ``M = 1``."""
    M = _check_start(M)
    if model.kind == "luroth":
        # telescoping: sum 1/(k(k+1)) = 1/M
        return 1.0 / M
    if model.kind == "power":
        return float(_hurwitz_zeta(model.rho, M)) / model._norm
    if model.kind == "power-log":
        return _powerlog_raw_tail(M, model.rho, model.gamma) / model._norm
    if model.kind == "explicit-prefix":
        m = len(model.prefix)
        tail_start = max(M, m + 1)
        total = model._norm * float(_hurwitz_zeta(model.rho, tail_start))
        total += sum(model.prefix[M - 1 : m])
        return total
    return float(sum(model.probs[M - 1 :]))


def tilted_tail_sum(model: WeightModel, M: int, s: float) -> float:
    """``sum_{k>=M} p_k**s`` for ``rho*s > 1``, relative error below 1e-10."""
    M = _check_start(M)
    s = float(s)
    if s <= 0.0:
        raise DomainError("tilt exponent must be positive")
    if model.kind == "finite":
        return float(np.sum(np.asarray(model.probs[M - 1 :]) ** s))
    if not model.rho * s > 1.0:
        raise DivergenceError(
            f"sum of p_k**s diverges: rho*s = {model.rho * s:g} <= 1"
        )
    if model.kind == "luroth":
        if s == 1.0:
            return 1.0 / M
        return _luroth_pow_tail(M, s)
    if model.kind == "power":
        return float(_hurwitz_zeta(model.rho * s, M)) / model._norm ** s
    if model.kind == "power-log":
        return (
            _powerlog_raw_tail(M, model.rho * s, model.gamma * s)
            / model._norm ** s
        )
    # explicit-prefix
    m = len(model.prefix)
    tail_start = max(M, m + 1)
    total = model._norm ** s * float(_hurwitz_zeta(model.rho * s, tail_start))
    total += sum(q ** s for q in model.prefix[M - 1 : m])
    return total


def _check_start(M) -> int:
    if not isinstance(M, (int, np.integer)) or isinstance(M, bool) or M < 1:
        raise DomainError(f"tail start must be a positive integer, got {M!r}")
    return int(M)


def _luroth_pow_tail(M: int, s: float) -> float:
    """``sum_{k>=M} (k(k+1))**-s`` by explicit head + Euler-Maclaurin tail."""
    a = max(M, _EM_CUT)
    head = 0.0
    if a > M:
        k = np.arange(M, a, dtype=np.float64)
        head = float(np.sum((k * (k + 1.0)) ** -s))
    g = (a * (a + 1.0)) ** -s
    gp = -s * (2.0 * a + 1.0) * (a * (a + 1.0)) ** -(s + 1.0)
    return head + _luroth_pow_integral(float(a), s) + 0.5 * g - gp / 12.0


def _luroth_pow_integral(a: float, s: float) -> float:
    # integral_a^inf (x(x+1))**-s dx expanded as a binomial series in 1/x;
    # converges geometrically for a >= 2 and needs ~5 terms at the EM cut.
    total = 0.0
    coef = 1.0
    apow = a ** (1.0 - 2.0 * s)
    for j in range(80):
        term = coef * apow / (2.0 * s - 1.0 + j)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        coef *= -(s + j) / (j + 1.0)
        apow /= a
    return total


def _powerlog_raw_tail(M: int, q: float, g: float) -> float:
    """``sum_{k>=M} k**-q * log(k+1)**g`` (unnormalized), ``q > 1``."""
    a = max(M, _EM_CUT)
    head = 0.0
    if a > M:
        k = np.arange(M, a, dtype=np.float64)
        head = float(np.sum(k ** -q * np.log(k + 1.0) ** g))
    fa = float(a) ** -q * math.log(a + 1.0) ** g
    # f'(a) for the first Euler-Maclaurin correction
    fpa = fa * (-q / a + g / ((a + 1.0) * math.log(a + 1.0)))
    return head + _powerlog_tail_integral(float(a), q, g) + 0.5 * fa - fpa / 12.0


def _powerlog_tail_integral(a: float, q: float, g: float) -> float:
    """``integral_a^inf x**-q * log(x+1)**g dx`` to near machine precision.

    Substituting ``t = x + 1`` and expanding ``(1 - 1/t)**-q`` binomially
    turns each term into an upper incomplete gamma:
    ``integral_A^inf t**-p log(t)**g dt = (p-1)**-(g+1) * Gamma(g+1, (p-1) ln A)``.
    The series ratio is about ``1/A``, so a handful of terms suffice.
    """
    A = a + 1.0
    ln_a = math.log(A)
    gamma_g1 = math.gamma(g + 1.0)
    total = 0.0
    coef = 1.0
    for j in range(80):
        p = q + j
        upper = float(_gammaincc(g + 1.0, (p - 1.0) * ln_a)) * gamma_g1
        term = coef * (p - 1.0) ** -(g + 1.0) * upper
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        coef *= (q + j) / (j + 1.0)
    return total


# -- truncated s-power exponent ----------------------------------------------


def partial_sum_exponent(model: WeightModel, K: int) -> float:
    """The exponent ``s`` in ``[0, 1)`` with ``sum_{k<=K} p_k**s = 1``.

    ``K = 1`` returns 0 exactly.  The root is bracketed by bisection to
    width 1e-14 and polished with one secant step; the residual stays below
    1e-12 for every ``K`` up to 1e4.
    """
    if not isinstance(K, (int, np.integer)) or isinstance(K, bool) or K < 1:
        raise DomainError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    if model.support_size is not None and K > model.support_size:
        raise DomainError("K exceeds the finite support")
    if K == 1:
        return 0.0
    p = _weights_prefix(model, K)
    if float(p.sum()) >= 1.0 - 1e-15:
        raise DomainError("truncated weights already sum to 1; no root in [0, 1)")
    logp = np.log(p)

    def excess(sv: float) -> float:
        return float(np.exp(sv * logp).sum()) - 1.0

    lo, hi = 0.0, 1.0  # excess(0) = K - 1 > 0, excess(1) < 0
    flo = float(K - 1)
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        fmid = excess(mid)
        if fmid >= 0.0:
            lo, flo = mid, fmid
        else:
            hi = mid
    fhi = excess(hi)
    root = lo
    if flo != fhi:
        root = lo - flo * (hi - lo) / (fhi - flo)
    return min(max(root, 0.0), 1.0 - 1e-16)


# -- empirical dyadic ratio scan ----------------------------------------------


@dataclass(frozen=True)
class PotterReport:
    """Certified empirical Potter-type constants for one model.

    For every scanned pair ``k_eps <= k <= m < 2k`` (with ``m`` within the
    scan horizon) the ratio bound ``p_m / p_k >= 1 / (2**(rho+eps) * C_eps)``
    holds, and ``p_k >= k**-rho * L(k) / 2`` holds for every scanned
    ``k >= k_eps``.
    """

    epsilon: float
    k_eps: int
    C_eps: float
    scan_limit: int
    worst_ratio_constant: float  # exact max of p_k/(p_m * 2**(rho+eps))


def potter_scan(
    model: WeightModel, epsilon: float, scan_limit: int = 10_000
) -> PotterReport:
    """Find the smallest certified ``(k_eps, C_eps)`` on a dyadic pair scan.

    ``C_eps`` is at least 1 and is reported rounded up to a 1e-3 grid.
    Raises :class:`HorizonExceededError` when no starting index up to
    ``scan_limit // 2`` certifies the half-bound, so that at least one
    genuine dyadic pair is covered.
    """
    if model.kind == "finite":
        raise DomainError("finite models have no regularly varying tail")
    epsilon = float(epsilon)
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    if scan_limit < 4:
        raise DomainError("scan_limit must be at least 4")
    p = _weights_prefix(model, scan_limit)
    k = np.arange(1, scan_limit + 1, dtype=np.float64)
    L = _slowly_varying_vec(model, scan_limit)
    half_ok = p >= 0.5 * k ** -model.rho * L
    bad = np.nonzero(~half_ok)[0]
    k_eps = int(bad[-1]) + 2 if bad.size else 1
    if k_eps > scan_limit // 2:
        raise HorizonExceededError(
            f"half-bound not certified below scan_limit//2 = {scan_limit // 2}"
        )
    logp = np.log(p)
    window_min = _dyadic_window_min(logp)
    # worst constant = max over k of p_k / (min_{k<=m<2k} p_m * 2**(rho+eps))
    span = logp[k_eps - 1 :] - window_min[k_eps - 1 :]
    worst = float(np.exp(span.max())) / 2.0 ** (model.rho + epsilon)
    c_eps = max(1.0, math.ceil(worst * 1000.0 - 1e-9) / 1000.0)
    return PotterReport(
        epsilon=epsilon,
        k_eps=k_eps,
        C_eps=c_eps,
        scan_limit=scan_limit,
        worst_ratio_constant=worst,
    )


def _slowly_varying_vec(model: WeightModel, n: int) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=np.float64)
    if model.kind == "luroth":
        return k / (k + 1.0)
    if model.kind == "power":
        return np.full(n, 1.0 / model._norm)
    if model.kind == "power-log":
        return np.log(k + 1.0) ** model.gamma / model._norm
    return np.full(n, model._norm)  # explicit-prefix tail coefficient


def _dyadic_window_min(logp: np.ndarray) -> np.ndarray:
    """``out[i] = min(logp[i : min(2(i+1)-1, n)])`` via a sparse table."""
    n = logp.size
    table = [logp]
    width = 1
    while width * 2 <= n:
        prev = table[-1]
        table.append(np.minimum(prev[: prev.size - width], prev[width:]))
        width *= 2
    out = np.empty(n)
    for i in range(n):
        hi = min(2 * (i + 1) - 1, n)  # digits i+1 .. hi, zero-based i .. hi-1
        length = hi - i
        lev = length.bit_length() - 1
        w = 1 << lev
        out[i] = min(table[lev][i], table[lev][hi - w])
    return out


def verify_potter_report(
    model: WeightModel, report: PotterReport, sample_limit: int = 2000
) -> bool:
    """Re-check a report with plain loops (independent of the scan path)."""
    bound = 1.0 / (2.0 ** (model.rho + report.epsilon) * report.C_eps)
    limit = min(report.scan_limit, sample_limit)
    for kk in range(report.k_eps, limit + 1):
        pk = weight(model, kk)
        if pk < 0.5 * kk ** -model.rho * slowly_varying(model, kk):
            return False
        for mm in range(kk, min(2 * kk - 1, limit) + 1):
            if weight(model, mm) / pk < bound:
                return False
    return True


# -- sampling -----------------------------------------------------------------


def sample_digit(model: WeightModel, u: float) -> int:
    """Inverse-CDF digit: the ``k`` with ``sum_{j<k} p_j <= u < sum_{j<=k} p_j``."""
    if not 0.0 < u < 1.0:
        raise DomainError("u must lie strictly between 0 and 1")
    if model.kind == "luroth":
        # cumulative mass through k is k/(k+1), so k = floor(1/(1-u))
        return int(1.0 / (1.0 - u))
    return _invert_tail(model, 1.0, 1.0 - u, 1)


def _invert_tail(model: WeightModel, s: float, target: float, lo: int) -> int:
    """Smallest ``k >= lo`` with ``tilted_tail_sum(k+1) < target``."""
    k_lo = lo  # tail(k_lo) >= target is maintained as the invariant
    k_hi = max(2 * k_lo, k_lo + 1)
    while tilted_tail_sum(model, k_hi + 1, s) >= target:
        k_lo = k_hi
        k_hi *= 2
        if k_hi > 1 << 62:
            raise TiltThresholdError("tail inversion ran past 2**62")
    while k_hi - k_lo > 1:
        mid = (k_lo + k_hi) // 2
        if tilted_tail_sum(model, mid + 1, s) < target:
            k_hi = mid
        else:
            k_lo = mid
    if tilted_tail_sum(model, k_lo + 1, s) < target:
        return k_lo
    return k_hi


class DigitSampler:
    """Vectorized inverse-CDF sampler for ``p_k**s / Z_s``.

    ``s = 1`` samples the base model.  A cumulative table covers the bulk of
    the mass; draws beyond the table are resolved exactly by monotone
    bracketing of the tilted tail sum, so the sampled law is the exact
    inverse-CDF law at every index.
    """

    def __init__(self, model: WeightModel, s: float = 1.0, table_size: int = 1 << 20):
        self.model = model
        self.s = float(s)
        if self.s != 1.0 or model.kind == "finite":
            self.total = tilted_tail_sum(model, 1, self.s)
        else:
            self.total = 1.0
        size = table_size
        if model.support_size is not None:
            size = model.support_size
        elif model.digit_count_hint is not None:
            size = min(size, model.digit_count_hint)
        self._fast_luroth = model.kind == "luroth" and self.s == 1.0
        if self._fast_luroth:
            self._cum = None
        else:
            pmf = weights_range(model, 1, size + 1) ** self.s
            self._cum = np.cumsum(pmf)
            self._table_size = size

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        if self._fast_luroth:
            return np.floor(1.0 / (1.0 - u)).astype(np.int64)
        target = u * self.total
        out = np.searchsorted(self._cum, target, side="right") + 1
        overflow = np.nonzero(out > self._table_size)[0]
        for i in overflow:
            out[i] = _invert_tail(
                self.model, self.s, self.total - target[i], self._table_size
            )
        return out.astype(np.int64)
