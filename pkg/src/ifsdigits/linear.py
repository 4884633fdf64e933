"""Block concatenation forcing a prescribed linear distinct-digit rate.

Words are built level by level.  Level ``j`` contributes a block of length
``2**j`` over its own dyadic alphabet (alphabets of different levels are
disjoint), and inside a block the running number of distinct digits is
pinned to the profile ``r(t) = ceil(theta * t)``: at a *new* time the block
uses a fresh alphabet symbol, at a *repeat* time it reuses one of the
``r(t-1)`` symbols already seen.  Concatenating the blocks gives points
whose distinct-digit count satisfies ``theta*n <= D_n < theta*n + depth``
at every position ``n``.

The number of admissible blocks at a level factorizes as a falling
factorial (for the new times) times the product of ``r(t-1)`` over repeat
times; the uniform measure on infinite concatenations is the product of
the per-level uniform block choices.  Rates ``theta`` given as floats are
read as their shortest decimal literal so profile ceilings are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codec import cylinder
from .errors import (
    DepthError,
    DomainError,
    EnumerationSizeError,
    InfeasibleError,
    NotInSupportError,
)
from .occupancy import distinct_counts
from .weights import WeightModel, log_weights_of, potter_scan

__all__ = [
    "BlockProfile",
    "BlockCount",
    "BlockLevel",
    "BlockSchedule",
    "as_rate",
    "distinctness_profile",
    "count_blocks",
    "enumerate_blocks",
    "build_block_schedule",
    "point_trace",
    "sandwich_violations",
]

_EXACT_COUNT_MAX_LEN = 2048


def as_rate(theta) -> Fraction:
    """Normalize a target rate to an exact ``Fraction`` in ``(0, 1]``.

    Floats are interpreted through their shortest decimal representation,
    so ``as_rate(0.3) == Fraction(3, 10)``.
    """
    if isinstance(theta, float):
        theta = Fraction(str(theta))
    else:
        theta = Fraction(theta)
    if not 0 < theta <= 1:
        raise DomainError("the rate theta must lie in (0, 1]")
    return theta


@dataclass(frozen=True, eq=False)
class BlockProfile:
    """Distinctness profile ``r(t) = ceil(theta t)`` for ``t = 0..length``."""

    theta: Fraction
    length: int
    r: np.ndarray  # int64, index t in [0, length]
    is_new: np.ndarray  # bool, True where r steps up; index 0 unused
    new_count: int  # r(length)

    def new_times(self) -> tuple[int, ...]:
        return tuple(int(t) for t in np.nonzero(self.is_new)[0])


def distinctness_profile(theta, L: int) -> BlockProfile:
    if L < 1:
        raise DomainError("block length must be positive")
    theta = as_rate(theta)
    num, den = theta.numerator, theta.denominator
    r = [0] * (L + 1)
    for t in range(1, L + 1):
        r[t] = (num * t + den - 1) // den
    arr = np.asarray(r, dtype=np.int64)
    is_new = np.zeros(L + 1, dtype=bool)
    is_new[1:] = arr[1:] > arr[:-1]
    return BlockProfile(
        theta=theta, length=L, r=arr, is_new=is_new, new_count=int(arr[L])
    )


@dataclass(frozen=True)
class BlockCount:
    log_count: float
    exact: int | None


def count_blocks(N: int, L: int, theta) -> BlockCount:
    """Number of admissible blocks of length ``L`` over ``N`` symbols.

    Equals ``N! / (N - m)!`` times the product of ``r(t-1)`` over repeat
    times, where ``m = ceil(theta L)``.  Exact value reported for block
    lengths up to 2048; the log form always.
    """
    if N < 1:
        raise DomainError("alphabet size must be positive")
    prof = distinctness_profile(theta, L)
    m = prof.new_count
    if m > N:
        raise InfeasibleError(
            f"no admissible block: profile needs {m} distinct symbols, alphabet has {N}"
        )
    repeats = np.nonzero(~prof.is_new[1:])[0] + 1  # times t with a reuse
    prev = prof.r[repeats - 1]
    # Falling factorial summed term by term: the lgamma difference cancels
    # catastrophically once N dwarfs the float64 mantissa.
    log_fall = float(np.log(float(N) - np.arange(m, dtype=np.float64)).sum())
    log_count = float(log_fall + np.log(prev).sum())
    exact = None
    if L <= _EXACT_COUNT_MAX_LEN:
        exact = 1
        for i in range(m):
            exact *= N - i
        for v in prev:
            exact *= int(v)
        if exact.bit_length() > 128:
            exact = None
    return BlockCount(log_count=log_count, exact=exact)


def enumerate_blocks(N: int, L: int, theta, alphabet=None, limit: int = 2_000_000):
    """Yield every admissible block (deterministic DFS order).

    Intended for enumeration oracles; refuses to start when the exact count
    exceeds ``limit``.
    """
    prof = distinctness_profile(theta, L)
    if prof.new_count > N:
        return
    total = count_blocks(N, L, theta).exact
    if total is not None and total > limit:
        raise EnumerationSizeError(f"{total} blocks exceed the limit {limit}")
    symbols = tuple(range(1, N + 1)) if alphabet is None else tuple(alphabet)
    if len(symbols) != N:
        raise DomainError("alphabet size mismatch")
    word = [0] * L
    seen: list[int] = []
    seen_set: set[int] = set()

    def rec(t: int):
        if t > L:
            yield tuple(word)
            return
        if prof.is_new[t]:
            for a in symbols:
                if a in seen_set:
                    continue
                word[t - 1] = a
                seen.append(a)
                seen_set.add(a)
                yield from rec(t + 1)
                seen.pop()
                seen_set.remove(a)
        else:
            for a in tuple(seen):
                word[t - 1] = a
                yield from rec(t + 1)

    yield from rec(1)


@dataclass(frozen=True, eq=False)
class BlockLevel:
    """One level of a schedule: block shape, alphabet window, block count."""

    j: int
    length: int  # 2**j
    profile: BlockProfile
    alphabet_start: int  # alphabet is [start, start + size)
    alphabet_size: int
    log_count: float
    exact_count: int | None

    @property
    def new_count(self) -> int:
        return self.profile.new_count


@dataclass(frozen=True, eq=False)
class BlockSchedule:
    """Level schedule for one rate/model pair, with the uniform block measure."""

    model: WeightModel
    theta: Fraction
    k1: int
    levels: tuple[BlockLevel, ...]
    _block_cache: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, j: int) -> BlockLevel:
        if not 1 <= j <= self.depth:
            raise DomainError(f"level {j} outside schedule depth {self.depth}")
        return self.levels[j - 1]

    def boundary(self, j: int) -> int:
        """Word length after ``j`` full blocks: ``2**(j+1) - 2``."""
        if not 0 <= j <= self.depth:
            raise DomainError("level outside schedule")
        return (1 << (j + 1)) - 2

    # -- sampling -------------------------------------------------------------

    def sample_block(self, j: int, rng: np.random.Generator) -> np.ndarray:
        """One uniform admissible block at level ``j``."""
        lev = self.level(j)
        prof = lev.profile
        new_syms = lev.alphabet_start + rng.choice(
            lev.alphabet_size, size=lev.new_count, replace=False
        )
        digits = np.zeros(lev.length, dtype=np.int64)
        new_mask = prof.is_new[1:]
        digits[new_mask] = new_syms
        repeat_t = np.nonzero(~new_mask)[0] + 1
        if repeat_t.size:
            pool = prof.r[repeat_t - 1]  # always >= 1 (t = 1 is a new time)
            idx = rng.integers(0, pool)
            digits[~new_mask] = new_syms[idx]
        return digits

    def sample_word(self, depth: int, rng: np.random.Generator) -> np.ndarray:
        """Concatenation of one sampled block per level ``1..depth``."""
        if not 1 <= depth <= self.depth:
            raise DomainError("depth outside schedule")
        return np.concatenate([self.sample_block(j, rng) for j in range(1, depth + 1)])

    # -- measure --------------------------------------------------------------

    def log_mass(self, word) -> float:
        """Log of the uniform-concatenation mass of the cylinder at ``word``.

        The word may stop mid-block; all admissible completions of the
        current block count toward the mass.  Inadmissible words raise
        :class:`NotInSupportError`.
        """
        digits = np.asarray(word, dtype=np.int64)
        total = 0.0
        pos = 0
        j = 0
        while pos < digits.size:
            j += 1
            if j > self.depth:
                raise DepthError("word runs past the schedule depth")
            lev = self.levels[j - 1]
            chunk = digits[pos : pos + lev.length]
            self._validate_block_prefix(lev, chunk)
            if chunk.size == lev.length:
                total -= lev.log_count
            else:
                total += self._log_completions(lev, chunk.size) - lev.log_count
            pos += chunk.size
        return total

    def _validate_block_prefix(self, lev: BlockLevel, chunk: np.ndarray) -> None:
        lo, hi = lev.alphabet_start, lev.alphabet_start + lev.alphabet_size
        if chunk.size and (chunk.min() < lo or chunk.max() >= hi):
            raise NotInSupportError(
                f"level {lev.j} digits must lie in [{lo}, {hi})"
            )
        seen: set[int] = set()
        for t in range(1, chunk.size + 1):
            d = int(chunk[t - 1])
            if lev.profile.is_new[t]:
                if d in seen:
                    raise NotInSupportError(
                        f"level {lev.j} position {t} must introduce a new digit"
                    )
                seen.add(d)
            elif d not in seen:
                raise NotInSupportError(
                    f"level {lev.j} position {t} must reuse a seen digit"
                )

    def _log_completions(self, lev: BlockLevel, t: int) -> float:
        """Log number of admissible ways to finish a block after ``t`` digits."""
        prof = lev.profile
        total = 0.0
        for u in range(t + 1, lev.length + 1):
            if prof.is_new[u]:
                total += math.log(lev.alphabet_size - int(prof.r[u - 1]))
            else:
                total += math.log(int(prof.r[u - 1]))
        return total

    def local_dimension(self, word) -> float:
        """``log mass / log diameter`` at a block-aligned word."""
        digits = np.asarray(word, dtype=np.int64)
        if digits.size == 0:
            raise DomainError("local dimension is undefined for the empty word")
        if digits.size != self.boundary(self._levels_spanned(digits.size)):
            raise DomainError("local dimension needs a block-aligned word")
        log_diam = float(np.sum(log_weights_of(self.model, digits)))
        return self.log_mass(digits) / log_diam

    def _levels_spanned(self, length: int) -> int:
        j = 0
        while self.boundary(j) < length and j < self.depth:
            j += 1
        return j

    # -- interval bracketing ----------------------------------------------------

    def interval_mass(
        self, a: float, b: float, depth_cap: int, enum_limit: int = 200_000
    ) -> tuple[float, float]:
        """Bracket the measure of ``[a, b)`` by block cylinders.

        Returns ``(lower, upper)``; the gap is at most the mass of the two
        boundary cylinders at ``depth_cap``.  Needs enumerable levels, so it
        is a desk-scale tool for small schedules.
        """
        if depth_cap < 1 or depth_cap > self.depth:
            raise DomainError("depth_cap outside schedule")
        a, b = float(a), float(b)
        if not b > a:
            return (0.0, 0.0)
        if a <= 0.0 and b >= 1.0:
            return (1.0, 1.0)
        lower, slack = self._mass_rec(1, depth_cap, 0.0, 1.0, 1.0, a, b, enum_limit)
        return lower, lower + slack

    def _mass_rec(self, j, depth_cap, x0, scale, mass, a, b, enum_limit):
        blocks = self._enumerated_geometry(j, enum_limit)
        share = mass / len(blocks)
        lower = 0.0
        slack = 0.0
        for left_rel, diam_rel in blocks:
            left = x0 + scale * left_rel
            right = left + scale * diam_rel
            if right <= a or left >= b:
                continue
            if a <= left and right <= b:
                lower += share
            elif j >= depth_cap:
                slack += share
            else:
                sub_lower, sub_slack = self._mass_rec(
                    j + 1, depth_cap, left, scale * diam_rel, share, a, b, enum_limit
                )
                lower += sub_lower
                slack += sub_slack
        return lower, slack

    def _enumerated_geometry(self, j: int, enum_limit: int):
        cached = self._block_cache.get(j)
        if cached is not None:
            return cached
        lev = self.level(j)
        if lev.exact_count is None or lev.exact_count > enum_limit:
            raise EnumerationSizeError(
                f"level {j} has too many blocks to enumerate"
            )
        alphabet = range(lev.alphabet_start, lev.alphabet_start + lev.alphabet_size)
        geoms = []
        for block in enumerate_blocks(
            lev.alphabet_size,
            lev.length,
            self.theta,
            alphabet=alphabet,
            limit=enum_limit,
        ):
            cyl = cylinder(self.model, block, exact=False)
            geoms.append((cyl.left, cyl.diam))
        self._block_cache[j] = geoms
        return geoms


def build_block_schedule(
    model: WeightModel, theta, depth: int, k1: int | None = None
) -> BlockSchedule:
    """Build the level schedule for rate ``theta`` down to ``depth`` blocks.

    ``k1`` defaults to the certified start index of a dyadic ratio scan with
    ``epsilon = 1``.  Alphabets are the dyadic windows
    ``[2**(j-1) * max(m_1, k1), 2**j * max(m_1, k1))``, pairwise disjoint by
    construction.
    """
    theta = as_rate(theta)
    if depth < 1:
        raise DomainError("depth must be positive")
    if k1 is None:
        k1 = potter_scan(model, 1.0).k_eps
    if k1 < 1:
        raise DomainError("k1 must be a positive integer")
    m1 = -((-2 * theta.numerator) // theta.denominator)  # ceil(2 theta)
    base = max(int(m1), int(k1))
    levels = []
    for j in range(1, depth + 1):
        length = 1 << j
        start = (1 << (j - 1)) * base
        if 2 * start > 1 << 62:
            raise DepthError(f"alphabet indices overflow at level {j}")
        size = start
        prof = distinctness_profile(theta, length)
        if prof.new_count > size:
            raise InfeasibleError(
                f"level {j} needs {prof.new_count} new symbols, window has {size}"
            )
        if model.support_size is not None and 2 * start - 1 > model.support_size:
            raise DomainError(
                f"level {j} alphabet exceeds the model support "
                f"({2 * start - 1} > {model.support_size})"
            )
        counts = count_blocks(size, length, theta)
        levels.append(
            BlockLevel(
                j=j,
                length=length,
                profile=prof,
                alphabet_start=start,
                alphabet_size=size,
                log_count=counts.log_count,
                exact_count=counts.exact,
            )
        )
    return BlockSchedule(model=model, theta=theta, k1=int(k1), levels=tuple(levels))


def point_trace(schedule: BlockSchedule, word) -> dict[str, np.ndarray]:
    """Per-position trace columns for an admissible word.

    Columns: position, distinct count, rate target ``theta*n``, the upper
    bound ``theta*n + j`` with ``j`` the current level, cumulative log mass
    under the uniform block measure, cumulative log diameter, and their
    ratio.  The mass is accumulated one conditional choice at a time, so a
    word ending mid-block costs no extra enumeration.
    """
    digits = np.asarray(word, dtype=np.int64)
    n = digits.size
    if n == 0:
        raise DomainError("trace needs a nonempty word")
    counts = distinct_counts(digits)
    log_diam = np.cumsum(log_weights_of(schedule.model, digits))
    theta_f = float(schedule.theta)
    target = theta_f * np.arange(1, n + 1)
    bound = np.empty(n)
    log_mass = np.empty(n)
    running = 0.0
    pos = 0
    j = 0
    while pos < n:
        j += 1
        if j > schedule.depth:
            raise DepthError("word runs past the schedule depth")
        lev = schedule.levels[j - 1]
        chunk = digits[pos : pos + lev.length]
        schedule._validate_block_prefix(lev, chunk)
        prof = lev.profile
        for t in range(1, chunk.size + 1):
            if prof.is_new[t]:
                pool = lev.alphabet_size - int(prof.r[t - 1])
            else:
                pool = int(prof.r[t - 1])
            running -= math.log(pool)
            log_mass[pos + t - 1] = running
            bound[pos + t - 1] = theta_f * (pos + t) + j
        pos += chunk.size
    return {
        "n": np.arange(1, n + 1),
        "distinct": counts,
        "target": target,
        "upper": bound,
        "log_mass": log_mass,
        "log_diam": log_diam,
        "local_dim": log_mass / log_diam,
    }


def sandwich_violations(theta, word) -> list[int]:
    """Positions ``n`` where ``theta*n <= D_n < theta*n + J(n)`` fails.

    ``J(n)`` is the number of blocks spanned by ``n`` positions, i.e. the
    level index of position ``n``; exact integer arithmetic throughout.
    """
    theta = as_rate(theta)
    num, den = theta.numerator, theta.denominator
    counts = distinct_counts(np.asarray(word, dtype=np.int64))
    bad = []
    level_end = 0
    j = 0
    for n in range(1, counts.size + 1):
        if n > level_end:
            j += 1
            level_end = (1 << (j + 1)) - 2
        d = int(counts[n - 1])
        if not (num * n <= d * den and d * den < num * n + j * den):
            bad.append(n)
    return bad
