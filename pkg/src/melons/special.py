"""Special functions: theta derivatives, reciprocity checks, Hermite-type
polynomials, Bernoulli numbers, Riemann zeta and the real gamma function.

Theta derivatives are taken along the imaginary axis,

    theta_a(x, it) = sum_n (2 pi i n)^a exp(2 pi i x n - pi n^2 t),

and ``vartheta_a(t) = theta_a(0, it)``.  For even ``a`` this is real,
``[a == 0] + 2 sum_{n>=1} (-4 pi^2 n^2)^(a/2) exp(-pi n^2 t)``; for odd ``a``
it vanishes identically.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConvergenceError, PoleError

EULER_GAMMA = 0.577215664901532860606512090082

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation policy for the exponential series in this module."""

    rel_tol: float = 1e-15
    max_terms: int = 10**6

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


DEFAULT_TOL = SeriesTolerance()


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0.0:
        raise ValueError(f"theta argument must be positive, got t={t}")
    return t


@lru_cache(maxsize=None)
def reciprocity_coefficient(a: int, k: int) -> int:
    """Integer ``C(a, 2k) (2k)! / k!`` appearing in the reciprocity law."""
    return math.comb(a, 2 * k) * math.factorial(2 * k) // math.factorial(k)


# ---------------------------------------------------------------------------
# theta derivatives on the imaginary axis
# ---------------------------------------------------------------------------

def theta_tail(a: int, t: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """Return ``vartheta_a(t) - [a == 0]`` by direct summation.

    Subtracting the ``n = 0`` term exactly keeps full relative accuracy for
    ``vartheta_0(t) - 1`` at large ``t``.  No reciprocity is used, so the
    cost grows like ``1/sqrt(t)`` for small ``t``.
    """
    t = _check_t(t)
    if a < 0:
        raise ValueError("derivative order must be non-negative")
    if a % 2:
        return 0.0
    b = a // 2
    sign = -1.0 if b % 2 else 1.0
    # terms grow while n^2 < a / (2 pi t); only stop after that
    n_peak = math.sqrt(a / (2.0 * math.pi * t)) if a else 0.0
    total = 0.0
    small = 0
    n = 0
    while True:
        n += 1
        if n > tol.max_terms:
            raise ConvergenceError(f"theta series did not converge within {tol.max_terms} terms")
        log_mag = a * (_LOG_2PI + math.log(n)) - math.pi * n * n * t
        term = math.exp(log_mag)
        total += term
        if n >= n_peak and term <= tol.rel_tol * total * 0.5:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return 2.0 * sign * total


def theta_series(a: int, t: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """``vartheta_a(t)`` by direct summation of its defining series."""
    return theta_tail(a, t, tol) + (1.0 if a == 0 else 0.0)


def theta_deriv(a: int, t: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """``vartheta_a(t) = theta_a(0, it)`` for ``t > 0``.

    For ``t < 1`` the value is assembled from ``vartheta_{a-2k}(1/t)``
    through the reciprocity law, where the series converges fast.
    """
    t = _check_t(t)
    if a < 0:
        raise ValueError("derivative order must be non-negative")
    if a % 2:
        return 0.0
    if t >= 1.0:
        return theta_series(a, t, tol)
    u = 1.0 / t
    total = 0.0
    for k in range(a // 2 + 1):
        total += (reciprocity_coefficient(a, k) * math.pi**k * u ** (a - k + 0.5)
                  * theta_series(a - 2 * k, u, tol))
    return -total if (a // 2) % 2 else total


def theta_general(a: int, x: complex, t: float, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """``theta_a(x, it)`` for complex ``x`` by direct summation.

    The summation window is centred where ``|exp(2 pi i x n - pi n^2 t)|`` peaks
    and widened in both directions until the terms are negligible.
    """
    return _theta_general(a, x, t, tol)[0]


def _theta_general(a: int, x: complex, t: float, tol: SeriesTolerance) -> tuple[complex, float]:
    # returns (value, sum of |terms|)
    t = _check_t(t)
    if a < 0:
        raise ValueError("derivative order must be non-negative")
    x = complex(x)
    centre = int(round(-x.imag / t))
    ia = 1j**a

    def term(n: int) -> tuple[complex, float]:
        if n == 0:
            return (1.0 + 0j, 0.0) if a == 0 else (0j, -math.inf)
        log_mag = a * (_LOG_2PI + math.log(abs(n))) - math.pi * n * n * t - 2.0 * math.pi * x.imag * n
        phase = ia * (1 if n > 0 or a % 2 == 0 else -1) * cmath.exp(2j * math.pi * x.real * n)
        return phase * math.exp(log_mag), log_mag

    total, scale_log = term(centre)
    abs_sum = abs(total)
    count = 1
    for direction in (1, -1):
        n = centre
        small = 0
        prev = math.inf
        while True:
            n += direction
            count += 1
            if count > tol.max_terms:
                raise ConvergenceError("theta series did not converge")
            value, log_mag = term(n)
            total += value
            abs_sum += abs(value)
            scale_log = max(scale_log, log_mag)
            if log_mag < prev and log_mag < scale_log + math.log(tol.rel_tol) - 2.0:
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
            prev = log_mag
    return total, abs_sum


# ---------------------------------------------------------------------------
# reciprocity residuals
# ---------------------------------------------------------------------------

def corollary_sides(a: int, y: float, tol: SeriesTolerance = DEFAULT_TOL) -> tuple[float, float, float]:
    """Both sides of the reciprocity law for ``vartheta_a`` plus a magnitude scale.

    Returns ``(lhs, rhs, scale)`` where ``lhs = vartheta_a(y)`` and ``rhs`` is
    the finite combination of ``vartheta_{a-2k}(1/y)``; all theta values are
    summed directly.  ``scale`` is the largest magnitude among the terms.
    """
    y = _check_t(y)
    lhs = theta_series(a, y, tol)
    if a % 2:
        return lhs, 0.0, 0.0
    terms = [reciprocity_coefficient(a, k) * math.pi**k * y ** -(a - k + 0.5)
             * theta_series(a - 2 * k, 1.0 / y, tol) for k in range(a // 2 + 1)]
    rhs = math.fsum(terms)
    if (a // 2) % 2:
        rhs = -rhs
    scale = max([abs(lhs)] + [abs(v) for v in terms])
    return lhs, rhs, scale


def reciprocity_residual_corollary(a: int, y: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """Absolute residual of the reciprocity law for ``vartheta_a`` at ``y``."""
    lhs, rhs, _ = corollary_sides(a, y, tol)
    return abs(lhs - rhs)


def proposition_sides(a: int, x: float, t: float,
                      tol: SeriesTolerance = DEFAULT_TOL) -> tuple[complex, complex, float]:
    """Both sides of the generalised theta reciprocity at ``y = it``.

    The left side combines ``theta_{a-2k}(x, y)``; the right side combines
    ``theta_{a-k}(x/y, -1/y)``.  With ``y = it`` the branch of ``(y/i)^e`` is
    simply ``t^e``, ``x/y = -ix/t`` and ``-1/y = i/t``.  ``scale`` bounds the
    absolute sum of all series terms on either side.
    """
    t = _check_t(t)
    lhs = rhs = 0j
    lhs_scale = rhs_scale = 0.0
    for k in range(a // 2 + 1):
        c = reciprocity_coefficient(a, k) * math.pi**k * t ** (a - k + 0.5)
        value, mag = _theta_general(a - 2 * k, x, t, tol)
        lhs += c * value
        lhs_scale += abs(c) * mag
    xs = -1j * x / t
    pref = math.exp(-math.pi * x * x / t)
    for k in range(a + 1):
        c = pref * math.comb(a, k) * (-x) ** k * 1j ** (k - a) * (2.0 * math.pi) ** k
        value, mag = _theta_general(a - k, xs, 1.0 / t, tol)
        rhs += c * value
        rhs_scale += abs(c) * mag
    return lhs, rhs, max(lhs_scale, rhs_scale)


def reciprocity_residual_proposition(a: int, x: float, t: float,
                                     tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """Absolute residual of the generalised theta reciprocity at ``(x, it)``."""
    lhs, rhs, _ = proposition_sides(a, x, t, tol)
    return abs(lhs - rhs)


def hermite_sides(a: int, y: float, tol: SeriesTolerance = DEFAULT_TOL) -> tuple[float, float, float]:
    """``vartheta_{2a}(1/y)`` against ``y^{a+1/2} pi^a sum_n (2a)! phi_{2a}(n sqrt(pi y)) e^{-pi n^2 y}``.

    Both sides are summed directly; returns ``(lhs, rhs, scale)``.
    """
    y = _check_t(y)
    lhs = theta_series(2 * a, 1.0 / y, tol)
    pref = y ** (a + 0.5) * math.pi**a * math.factorial(2 * a)
    root = math.sqrt(math.pi * y)
    terms = [pref * phi(2 * a, 0.0)]
    n = 1
    while True:
        term = 2.0 * pref * phi(2 * a, n * root) * math.exp(-math.pi * n * n * y)
        terms.append(term)
        if n * n * math.pi * y > 2 * a + 1 and abs(term) <= tol.rel_tol * 1e-3 * max(abs(v) for v in terms):
            break
        n += 1
        if n > tol.max_terms:
            raise ConvergenceError("hermite series did not converge")
    scale = max(abs(lhs), math.fsum(abs(v) for v in terms))
    return lhs, math.fsum(terms), scale


# ---------------------------------------------------------------------------
# polynomials and numbers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def phi_coefficients(k: int) -> tuple[tuple[int, Fraction], ...]:
    """Exact ``(power, coefficient)`` pairs of ``phi_k(w)`` in powers of ``w``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = []
    for m in range((k + 1) // 2, k + 1):
        power = 2 * m - k
        coef = Fraction((-1) ** m * math.comb(m, k - m) * 2**power, math.factorial(m))
        out.append((power, coef))
    return tuple(out)


def phi(k: int, w: float) -> float:
    """Hermite-type polynomial with ``(-1)^k k! phi_k = H_k`` (physicists').

    Evaluated exactly in rationals at the binary value of ``w`` and rounded
    once; the monomial form cancels badly for large ``k``.
    """
    x = Fraction(w)
    x2 = x * x
    acc = Fraction(0)
    # powers share the parity of k and step by 2, so Horner in w^2
    for _, c in reversed(phi_coefficients(k)):
        acc = acc * x2 + c
    if k % 2:
        acc *= x
    return float(acc)


@lru_cache(maxsize=None)
def _bernoulli_table(k: int) -> tuple[Fraction, ...]:
    if k == 0:
        return (Fraction(1),)
    prev = _bernoulli_table(k - 1)
    # sum_{j<=k} C(k+1, j) B_j = 0
    s = sum(math.comb(k + 1, j) * prev[j] for j in range(k))
    return prev + (-s / (k + 1),)


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number ``B_k`` with ``B_1 = -1/2``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _bernoulli_table(k)[k]


def gamma_real(x: float) -> float:
    """Gamma function on the real line; poles raise :class:`PoleError`."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma ``1/Gamma(x)``; zero at the non-positive integers."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


_BORWEIN_N = 40


@lru_cache(maxsize=None)
def _borwein_weights(n: int = _BORWEIN_N) -> tuple[float, ...]:
    d = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(n * math.factorial(n + i - 1) * 4**i, math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    dn = d[n]
    return tuple(float((d[k] - dn) / dn) for k in range(n))


def _eta(s: float) -> float:
    """Dirichlet eta function via Borwein's accelerated alternating series."""
    w = _borwein_weights()
    terms = [(-1) ** k * w[k] / (k + 1) ** s for k in range(len(w))]
    return -math.fsum(terms)


def zeta(sigma: float, tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """Riemann zeta on the real line (``sigma != 1``).

    Uses the accelerated eta series for ``sigma >= 1/2`` and the functional
    equation below that; non-positive integers use exact Bernoulli values.
    """
    s = float(sigma)
    if s == 1.0:
        raise PoleError("zeta has a pole at 1")
    if s <= 0 and s == math.floor(s):
        k = int(-s)
        return float(-bernoulli(k + 1) / (k + 1)) if k > 0 else -0.5
    if s >= 0.5:
        if s > 60.0:
            return 1.0 + 2.0**-s + 3.0**-s
        return _eta(s) / -math.expm1((1.0 - s) * math.log(2.0))
    # zeta(1 - s) = eta(1 - s) / (1 - 2^s); keep s exact near the pole
    return (2.0**s * math.pi ** (s - 1.0) * math.sin(math.pi * s / 2.0)
            * math.gamma(1.0 - s) * _eta(1.0 - s) / -math.expm1(s * math.log(2.0)))
