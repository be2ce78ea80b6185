"""Limit constants of the watermelon height: kappa, lambda and the limit law.

The leading moment constant is

    kappa_s = (pi^{s/2} / 2) int_0^inf t^{-1-s/2} (1 - D_p(t)) dt,
    D_p(t) = t^{p^2 + p/2} T_p(t) / ((-pi)^{p^2} M_p),

with ``T_p(t) = det(vartheta_{2i+2j+2}(t))``.  ``D_p(pi / x^2)`` is the limit
CDF of ``(H + 2)/sqrt(n)`` at ``x``, so the integrand is a survival function.
Two stable forms of ``D_p`` are used:

* ``t >= 1``: Cauchy-Binet turns ``T_p`` into a positive sum over ordered
  tuples ``1 <= n_0 < ... < n_{p-1}`` of ``V(n^2)^2 prod n_j^2 e^{-pi n_j^2 t}``;
* ``t < 1``: reciprocity on every entry gives ``D_p = det(H + R) / M_p`` with
  ``H`` an integer Hankel matrix of determinant ``M_p`` and ``R`` exponentially
  small, so ``1 - D_p = -(det(I + H^{-1} R) - 1)`` is evaluated without
  cancellation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .dirichlet import omega
from .errors import ConvergenceError
from .exact import det_exact
from .special import reciprocity_coefficient, theta_deriv, theta_series

KAPPA_TOL = 1e-10
_LOWER_CUT = 0.05  # survival < 1e-20 below this for p <= 5


@dataclass(frozen=True)
class KappaResult:
    p: int
    s: float
    value: float
    err_estimate: float

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be non-negative")


@dataclass(frozen=True)
class LimitCdfQuery:
    p: int
    t: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not self.t > 0:
            raise ValueError("t must be positive")


def _check_p(p: int) -> None:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")


def m_const(p: int) -> int:
    """``M_p = 2^{p^2} prod_{i<p} (2i+1)!``."""
    _check_p(p)
    return 2 ** (p * p) * math.prod(math.factorial(2 * i + 1) for i in range(p))


def t_det(p: int, t: float) -> float:
    """``T_p(t) = det(vartheta_{2i+2j+2}(t))_{0<=i,j<p}`` (plain float determinant)."""
    _check_p(p)
    if not t > 0:
        raise ValueError("t must be positive")
    col = [theta_deriv(2 * c, t) for c in range(1, 2 * p)]
    m = np.array([[col[i + j] for j in range(p)] for i in range(p)])
    return float(np.linalg.det(m))


# ---------------------------------------------------------------------------
# stable pieces of D_p
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _hankel_inverse(p: int) -> np.ndarray:
    """Exact inverse of ``H_ij = (2c)!/c!``, ``c = i+j+1``, rounded to floats."""
    h = [[Fraction(math.factorial(2 * (i + j + 1)), math.factorial(i + j + 1)) for j in range(p)]
         for i in range(p)]
    inv = [[Fraction(int(i == j)) for j in range(p)] for i in range(p)]
    for k in range(p):
        piv = h[k][k]
        h[k] = [v / piv for v in h[k]]
        inv[k] = [v / piv for v in inv[k]]
        for r in range(p):
            if r != k and h[r][k]:
                f = h[r][k]
                h[r] = [a - f * b for a, b in zip(h[r], h[k])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[k])]
    return np.array([[float(v) for v in row] for row in inv])


def _det_identity_plus_minus_one(x: np.ndarray) -> float:
    """``det(I + X) - 1`` as the sum of elementary symmetric functions of ``X``.

    Newton's identities on the power traces; exact cancellation-free for
    small ``X``.
    """
    p = x.shape[0]
    powers = []
    xk = np.eye(p)
    for _ in range(p):
        xk = xk @ x
        powers.append(float(np.trace(xk)))
    e = [1.0]
    for k in range(1, p + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * powers[i - 1] for i in range(1, k + 1)) / k)
    return math.fsum(e[1:])


def _excess_small_t(p: int, t: float) -> float:
    """``D_p(t) - 1`` for ``t < 1`` through the reciprocity-scaled matrix."""
    tau = 1.0 / t
    thetas = [theta_series(2 * m, tau) for m in range(2 * p)]
    theta0_excess = thetas[0] - 1.0
    pt = math.pi * t
    r = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            c = i + j + 1
            lead = math.factorial(2 * c) / math.factorial(c)
            acc = lead * theta0_excess
            for k in range(c):
                acc += reciprocity_coefficient(2 * c, k) * pt ** (k - c) * thetas[c - k]
            r[i, j] = acc
    return _det_identity_plus_minus_one(_hankel_inverse(p) @ r)


def _tuple_sum(p: int, decay, tol: float = 1e-18) -> float:
    """``sum_{1<=n_0<...<n_{p-1}} V(n^2)^2 prod n_j^2 decay(n_j^2)`` over tuples.

    Terms are positive; the largest index is increased until a whole shell
    ``n_{p-1} = N`` contributes less than ``tol`` relative.
    """
    total = 0.0
    top = p
    while True:
        shell = 0.0
        for rest in itertools.combinations(range(1, top), p - 1):
            ns = rest + (top,)
            sq = [n * n for n in ns]
            vdm = 1.0
            for a, b in itertools.combinations(sq, 2):
                vdm *= (b - a)
            w = vdm * vdm
            for q in sq:
                w *= q * decay(q)
            shell += w
        total += shell
        if shell <= tol * total or (total == 0.0 and top > 400):
            return total
        top += 1
        if top > 5000:
            raise ConvergenceError("tuple sum does not converge")


def _ratio_large_t(p: int, t: float) -> float:
    """``D_p(t)`` for ``t >= 1`` from the positive tuple sum."""
    pre = 2.0**p * 4.0 ** (p * p) * math.pi ** (p * p) * t ** (p * p + p / 2) / m_const(p)
    return pre * _tuple_sum(p, lambda q: math.exp(-math.pi * q * t))


def survival(p: int, t: float) -> float:
    """``1 - D_p(t)``: the kappa integrand without the power of ``t``."""
    if t >= 1.0:
        return 1.0 - _ratio_large_t(p, t)
    return -_excess_small_t(p, t)


# ---------------------------------------------------------------------------
# kappa and lambda
# ---------------------------------------------------------------------------

def _quad(f, lo, hi, tol):
    out = integrate.quad(f, lo, hi, epsabs=tol * 1e-2, epsrel=1e-12, limit=400, full_output=1)
    val, err = out[0], out[1]
    if len(out) > 3:
        # QUADPACK could not meet the request; keep a conservative estimate
        err = max(err, 1e-13 * abs(val))
    return val, err


@lru_cache(maxsize=256)
def kappa(p: int, s: float, tol: float = KAPPA_TOL) -> KappaResult:
    """``kappa_s^(p)`` by quadrature of the survival integrand."""
    _check_p(p)
    if not s > 0:
        raise ValueError("s must be positive")
    # beyond t_max the tuple ratio is below 1e-17
    t_max = 1.0
    while _ratio_large_t(p, t_max) > 1e-17:
        t_max *= 1.5
    lo_bound = survival(p, _LOWER_CUT) * _LOWER_CUT ** (-s / 2)
    head = 0.0
    err = abs(lo_bound)
    edges = [_LOWER_CUT, 0.1, 0.2, 0.4, 0.7, 1.0]
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _quad(lambda t: t ** (-1.0 - s / 2) * survival(p, t), a, b, tol)
        head += v
        err += e
    tail, e = _quad(lambda t: t ** (-1.0 - s / 2) * _ratio_large_t(p, t), 1.0, t_max, tol)
    err += e + 1e-17 * (2 / s)
    value = 0.5 * math.pi ** (s / 2) * (head + 2.0 / s - tail)
    err *= 0.5 * math.pi ** (s / 2)
    if err > tol * max(1.0, abs(value)):
        raise ConvergenceError(f"kappa({p}, {s}) error estimate {err:g} above tolerance")
    return KappaResult(p, s, value, err)


def _lambda_det(p: int, a: tuple[int, ...]) -> int:
    rows = []
    for i in range(p):
        row = []
        for j in range(p):
            c = i + j + 1
            row.append(0 if a[i] > c else
                       math.factorial(2 * c) // (math.factorial(c - a[i]) * math.factorial(2 * a[i])))
        rows.append(row)
    return det_exact(rows)


def lambda_sum(p: int, k: int, tol: float = 1e-13) -> float:
    """``lambda_k = -sum_a (-4)^{|a|} det((2i+2j+2)! / ((i+j+1-a_i)! (2a_i)!)) omega_{k-1,a}``.

    Row ``i`` vanishes once ``a_i > i + p``, so the sum is finite.
    ``lambda_0 = -(3/2) M_p``.
    """
    _check_p(p)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return -1.5 * m_const(p)
    terms = []
    for a in itertools.product(*(range(i + p + 1) for i in range(p))):
        d = _lambda_det(p, a)
        if d:
            terms.append((-4.0) ** sum(a) * d * omega(k - 1, tuple(sorted(a)), tol))
    return -math.fsum(terms)


def moment_asymptotic(p: int, n: float, s: int, tol: float = KAPPA_TOL) -> float:
    """``s kappa_s n^{s/2} - 3 C(s,2) kappa_{s-1} n^{(s-1)/2} - 3/2``."""
    _check_p(p)
    if s < 1:
        raise ValueError("s must be >= 1")
    out = s * kappa(p, s, tol).value * n ** (s / 2) - 1.5
    if s >= 2:
        out -= 3 * math.comb(s, 2) * kappa(p, s - 1, tol).value * n ** ((s - 1) / 2)
    return out


# ---------------------------------------------------------------------------
# limit law of (H + 2) / sqrt(n)
# ---------------------------------------------------------------------------

CDF_TOL = 1e-9
_CANCELLATION = 1e-3


def limit_cdf_det(q: LimitCdfQuery, tol: float = CDF_TOL) -> float:
    """``pi^{p/2} t^{-2p^2-p} / ((-2)^{p^2} prod (2i+1)!) det(vartheta_{2i+2j+2}(pi/t^2))``.

    For ``pi/t^2 >= 1`` the determinant is taken directly (entries are small);
    otherwise through the reciprocity-scaled form.  Where the direct determinant
    cancels below 1e-3 its relative precision is lost, and the Cauchy-Binet
    expansion of the same determinant (the positive ordered sum of
    :func:`limit_cdf_schehr`) is used instead.  The value is returned
    unclamped; leaving ``[-tol, 1 + tol]`` raises :class:`ConvergenceError`.
    """
    p, t = q.p, q.t
    tau = math.pi / (t * t)
    if tau < 1.0:
        value = 1.0 + _excess_small_t(p, tau)
    else:
        scale = math.sqrt(tau)
        col = [theta_deriv(2 * c, tau) * (-tau / math.pi) ** c for c in range(1, 2 * p)]
        m = np.array([[col[i + j] for j in range(p)] for i in range(p)])
        value = float(np.linalg.det(m)) * scale**p / m_const(p)
        if value < _CANCELLATION:
            value = limit_cdf_schehr(q)
    if not -tol <= value <= 1.0 + tol:
        raise ConvergenceError(f"limit CDF {value!r} outside [0, 1] beyond tolerance {tol:g}")
    return value


def limit_cdf_schehr(q: LimitCdfQuery, tol: float = 1e-18) -> float:
    """Ordered multiple sum over ``1 <= n_0 < ... < n_{p-1}``."""
    p, t = q.p, q.t
    pre = (2.0 ** (p * p + p) * math.pi ** (2 * p * p + p / 2) * t ** (-2 * p * p - p)
           / math.prod(math.factorial(2 * i + 1) for i in range(p)))
    k = (math.pi / t) ** 2
    return pre * _tuple_sum(p, lambda sq: math.exp(-k * sq), tol)


def limit_cdf_p1(t: float, tol: float = 1e-18) -> float:
    """``sum_{m in Z} (1 - 2 (m t)^2) e^{-(m t)^2}``."""
    if not t > 0:
        raise ValueError("t must be positive")
    terms = [1.0]
    m = 1
    while True:
        u = (m * t) ** 2
        term = 2.0 * (1.0 - 2.0 * u) * math.exp(-u)
        terms.append(term)
        if u > 1.0 and abs(term) < tol:
            return math.fsum(terms)
        m += 1
