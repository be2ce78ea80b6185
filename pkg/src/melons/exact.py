"""Exact counting of p-watermelons with wall and their height distribution.

A p-watermelon of length 2n with wall is a family of p nonintersecting
+-1 lattice paths; branch i runs from height 2i back to height 2i in 2n
steps and no branch goes below zero.  Its height is the maximum reached by
the top branch.

Counts come from determinants of single-path counts (Lindström-Gessel-
Viennot); height-bounded single-path counts are binomial sums obtained by
repeated reflection.  Everything here is exact integer arithmetic.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import ResourceLimitError

ENUMERATION_LIMIT = 200_000


@dataclass(frozen=True)
class WatermelonSpec:
    """The ensemble of p-watermelons of length 2n with wall.

    ``n = 0`` is accepted as a degenerate case: a single empty watermelon
    whose height is taken to be ``2p - 2`` (the top starting point).
    """

    p: int
    n: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")


@dataclass(frozen=True)
class CountResult:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("counts are non-negative")

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, CountResult):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


@dataclass(frozen=True)
class HeightDistribution:
    """Exact law of the height: ``counts[h]`` watermelons have height ``h``."""

    spec: WatermelonSpec
    counts: dict[int, int]
    total: int

    def probability(self, h: int) -> Fraction:
        return Fraction(self.counts.get(h, 0), self.total)

    def cdf(self, h: int) -> Fraction:
        """``P(H <= h)``."""
        return Fraction(sum(c for k, c in self.counts.items() if k <= h), self.total)

    def moment(self, s: int) -> Fraction:
        return Fraction(sum(h**s * c for h, c in self.counts.items()), self.total)


@dataclass(frozen=True)
class PathFamily:
    """Step matrix of a watermelon: ``steps[i][tau]`` is +1 or -1."""

    spec: WatermelonSpec
    steps: tuple[tuple[int, ...], ...] = field(repr=False)

    def heights(self) -> list[list[int]]:
        """Heights of every branch at times ``0..2n``."""
        out = []
        for i, row in enumerate(self.steps):
            y = [2 * i]
            for s in row:
                y.append(y[-1] + s)
            out.append(y)
        return out

    def validate(self) -> None:
        """Raise ``ValueError`` unless this is a watermelon with wall."""
        p, n = self.spec.p, self.spec.n
        if len(self.steps) != p or any(len(r) != 2 * n for r in self.steps):
            raise ValueError("step matrix must have shape p x 2n")
        if any(s not in (1, -1) for r in self.steps for s in r):
            raise ValueError("steps must be +1 or -1")
        ys = self.heights()
        for i, y in enumerate(ys):
            if y[-1] != 2 * i:
                raise ValueError(f"branch {i} does not return to height {2 * i}")
            if min(y) < 0:
                raise ValueError(f"branch {i} goes below the wall")
        for i in range(p - 1):
            if any(lo >= hi for lo, hi in zip(ys[i], ys[i + 1])):
                raise ValueError(f"branches {i} and {i + 1} intersect")


# ---------------------------------------------------------------------------
# basic counts
# ---------------------------------------------------------------------------

def binomial(n: int, k: int) -> int:
    """``C(n, k)``, zero outside ``0 <= k <= n``."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=8)
def _binomial_row(n: int) -> tuple[int, ...]:
    row = [1] * (n + 1)
    for k in range(1, n + 1):
        row[k] = row[k - 1] * (n - k + 1) // k
    return tuple(row)


def ballot_count(a: int, b: int, length: int) -> int:
    """Paths of ``length`` +-1 steps from height ``a`` to ``b`` never below 0."""
    if a < 0 or b < 0 or length < 0 or (length + b - a) % 2:
        return 0
    return binomial(length, (length + b - a) // 2) - binomial(length, (length + a + b) // 2 + 1)


def det_exact(matrix: Sequence[Sequence[int | Fraction]]) -> int | Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rational entries are scaled to integers row by row first.  The result is
    an ``int`` when every entry is integral, otherwise a ``Fraction``.
    """
    rows = [list(r) for r in matrix]
    size = len(rows)
    if any(len(r) != size for r in rows):
        raise ValueError("matrix must be square")
    if size == 0:
        return 1
    denom = 1
    integral = True
    for r in rows:
        if any(isinstance(v, Fraction) and v.denominator != 1 for v in r):
            integral = False
            scale = math.lcm(*(Fraction(v).denominator for v in r))
            r[:] = [int(Fraction(v) * scale) for v in r]
            denom *= scale
        else:
            r[:] = [int(v) for v in r]
    a = rows
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if a[i][k] != 0), None)
            if swap is None:
                return 0 if integral else Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, size):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    det = sign * a[-1][-1]
    if integral:
        return det
    return Fraction(det, denom)


# ---------------------------------------------------------------------------
# watermelon counts
# ---------------------------------------------------------------------------

def count_total(spec: WatermelonSpec) -> CountResult:
    """Number of p-watermelons of length 2n with wall (determinant formula)."""
    p, n = spec.p, spec.n
    two_n = 2 * n
    m = [[binomial(two_n, n + i - j) - binomial(two_n, n - 1 - i - j) for j in range(p)]
         for i in range(p)]
    return CountResult(det_exact(m))


def count_total_closed(spec: WatermelonSpec) -> CountResult:
    """Same count from the product ``prod_j C(2n+2j, n) / C(n+2j+1, n)``."""
    p, n = spec.p, spec.n
    value = Fraction(1)
    for j in range(p):
        value *= Fraction(math.comb(2 * n + 2 * j, n), math.comb(n + 2 * j + 1, n))
    assert value.denominator == 1, "closed-form product must be an integer"
    return CountResult(value.numerator)


def _bounded_entry(row: tuple[int, ...], n: int, period: int, offset: int) -> int:
    # sum over m of C(2n, n + m*period + offset); row holds C(2n, .)
    return sum(row[(n + offset) % period::period])


def count_bounded(spec: WatermelonSpec, h: int) -> CountResult:
    """Watermelons whose height is strictly smaller than ``h``.

    Single-branch entries are the reflection sums
    ``sum_m C(2n, n + m(h+1) + i - j) - C(2n, n + m(h+1) - 1 - i - j)``,
    where only the finitely many nonzero binomials are visited.
    """
    p, n = spec.p, spec.n
    if h < 0:
        raise ValueError("h must be non-negative")
    if n == 0:
        return CountResult(1 if h > 2 * p - 2 else 0)
    row = _binomial_row(2 * n)
    period = h + 1
    m = [[_bounded_entry(row, n, period, i - j) - _bounded_entry(row, n, period, -1 - i - j)
          for j in range(p)] for i in range(p)]
    return CountResult(det_exact(m))


def _workers() -> int:
    raw = os.environ.get("MELON_THREADS", "").strip()
    try:
        value = int(raw) if raw else 0
    except ValueError:
        value = 0
    return value if value > 0 else 1


def _bounded_values(spec: WatermelonSpec, hs: list[int]) -> list[int]:
    return [count_bounded(spec, h).value for h in hs]


def height_pmf(spec: WatermelonSpec) -> HeightDistribution:
    """Exact height distribution from successive bounded counts.

    ``MELON_THREADS > 1`` spreads the bounded counts over worker processes;
    the result does not depend on it.
    """
    p, n = spec.p, spec.n
    total = count_total(spec).value
    if n == 0:
        return HeightDistribution(spec, {2 * p - 2: 1}, 1)
    lo, hi = 2 * p - 1, n + 2 * p - 2
    hs = list(range(lo, hi + 2))
    workers = _workers()
    if workers > 1 and len(hs) > 64:
        chunks = [hs[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_bounded_values, [spec] * workers, chunks))
        bounded = dict(itertools.chain.from_iterable(zip(c, v) for c, v in zip(chunks, parts)))
    else:
        bounded = dict(zip(hs, _bounded_values(spec, hs)))
    counts = {}
    for h in range(lo, hi + 1):
        c = bounded[h + 1] - bounded[h]
        if c:
            counts[h] = c
    assert bounded[hi + 1] == total
    return HeightDistribution(spec, counts, total)


def exact_moment(spec: WatermelonSpec, s: int) -> Fraction:
    """``E[H^s]`` from the tail-sum ``sum_h (h^s - (h-1)^s)(M - M_h) / M``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    p, n = spec.p, spec.n
    total = count_total(spec).value
    if n == 0:
        return Fraction((2 * p - 2) ** s)
    acc = 0
    for h in range(1, n + 2 * p - 1):
        acc += (h**s - (h - 1) ** s) * (total - count_bounded(spec, h).value)
    return Fraction(acc, total)


def cdf_exact(spec: WatermelonSpec, h: int) -> Fraction:
    """``P(H <= h)`` as an exact rational."""
    return Fraction(count_bounded(spec, h + 1).value, count_total(spec).value)


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

def compute_height(fam: PathFamily) -> int:
    """Maximum height of the top branch; validates the family first."""
    fam.validate()
    if fam.spec.n == 0:
        return 2 * fam.spec.p - 2
    return max(fam.heights()[-1])


def enumerate_all(spec: WatermelonSpec, limit: int = ENUMERATION_LIMIT) -> list[PathFamily]:
    """Every watermelon of ``spec``, in lexicographic order of the flattened
    step matrix (branch 0 first, ``-1 < +1``).

    Raises :class:`ResourceLimitError` when more than ``limit`` families exist.
    """
    p, n = spec.p, spec.n
    expected = count_total(spec).value
    if expected > limit:
        raise ResourceLimitError(f"{expected} watermelons exceed the enumeration limit {limit}")
    length = 2 * n
    moves = list(itertools.product((-1, 1), repeat=p))
    found: list[tuple[tuple[int, ...], ...]] = []

    def extend(tau: int, pos: tuple[int, ...], history: list[tuple[int, ...]]):
        if tau == length:
            found.append(tuple(zip(*history)) if history else tuple(() for _ in range(p)))
            return
        remaining = length - tau - 1
        for mv in moves:
            new = tuple(y + d for y, d in zip(pos, mv))
            if new[0] < 0 or any(new[i] >= new[i + 1] for i in range(p - 1)):
                continue
            # each branch must still be able to return home
            if any(abs(y - 2 * i) > remaining for i, y in enumerate(new)):
                continue
            history.append(mv)
            extend(tau + 1, new, history)
            history.pop()

    extend(0, tuple(2 * i for i in range(p)), [])
    found.sort(key=lambda st: tuple(itertools.chain.from_iterable(st)))
    return [PathFamily(spec, st) for st in found]


def height_histogram(families: Sequence[PathFamily]) -> dict[int, int]:
    return dict(Counter(compute_height(f) for f in families))
