"""Multidimensional Dirichlet series ``Z_{2a}(z) = sum_{m != 0} m^{2a} / |m|^{2z}``.

Three evaluation routes are provided:

* :func:`lattice_sum` / :func:`z_series_direct` sum the lattice directly in
  the region of absolute convergence;
* :func:`z_continued` uses the meromorphic continuation built from theta
  products (an explicit simple pole plus two entire integrals over [1, inf));
* for ``p = 1`` everything reduces to ``2 zeta(2z - 2a)``, used by the tests.

The second half of the module holds the theta-sum functions ``g_{k,a}(n)``
and ``G_{s,a}(n)`` together with the exponentially accurate asymptotic
expansion of ``g``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special as sps

from .errors import ConvergenceError, PoleError
from .special import (EULER_GAMMA, bernoulli, reciprocity_coefficient, rgamma,
                      theta_tail, zeta)

QUAD_REL_TOL = 1e-13
_POINT_BUDGET = 8_000_000


@dataclass(frozen=True)
class DirichletQuery:
    """``Z_{2a}(z)``: ``a`` holds half-exponents, one per lattice dimension."""

    a: tuple[int, ...]
    z: float

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        if not self.a:
            raise ValueError("a must have at least one component")
        if any(v < 0 for v in self.a):
            raise ValueError("half-exponents must be non-negative")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def pole(self) -> float:
        return self.p / 2 + sum(self.a)


def _as_tuple(a: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(v) for v in a)
    if not out or any(v < 0 for v in out):
        raise ValueError("a must be a non-empty vector of non-negative integers")
    return out


def pole_weight(a: Sequence[int]) -> float:
    """``prod_i (2 a_i)! / (4^{a_i} a_i!)``, the Gaussian moment factor."""
    out = 1.0
    for v in a:
        out *= math.factorial(2 * v) / (4**v * math.factorial(v))
    return out


# ---------------------------------------------------------------------------
# direct lattice summation
# ---------------------------------------------------------------------------

def _shell_sums(exponents: tuple[int, ...], z: float, radius: int) -> np.ndarray:
    """Sums of ``m^e / |m|^{2z}`` over the cube shells ``|m|_inf = r``.

    All exponents are even here, so the summand is even in every coordinate
    and only the closed positive orthant is visited, with multiplicity
    ``2^(number of nonzero coordinates)``.
    """
    p = len(exponents)
    shells = np.zeros(radius + 1)
    axis = np.arange(radius + 1, dtype=float)
    mult_axis = np.where(axis > 0, 2.0, 1.0)
    if p == 1:
        r = axis[1:]
        shells[1:] = 2.0 * r ** (exponents[0] - 2.0 * z)
        return shells
    rest = np.meshgrid(*([axis] * (p - 1)), indexing="ij")
    rest_sq = sum(g * g for g in rest)
    rest_inf = np.maximum.reduce(rest) if p > 2 else rest[0]
    rest_mono = np.ones_like(rest_sq)
    rest_mult = np.ones_like(rest_sq)
    for g, e in zip(rest, exponents[1:]):
        rest_mono = rest_mono * g**e
        rest_mult = rest_mult * np.where(g > 0, 2.0, 1.0)
    rest_inf_i = rest_inf.astype(np.int64).ravel()
    for m0 in range(radius + 1):
        sq = rest_sq + m0 * m0
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (m0 ** exponents[0]) * rest_mono * rest_mult * mult_axis[m0] * sq ** (-z)
        if m0 == 0:
            vals.ravel()[0] = 0.0
        inf_norm = np.maximum(rest_inf_i, m0)
        shells += np.bincount(inf_norm, weights=vals.ravel(), minlength=radius + 1)[: radius + 1]
    return shells


def lattice_sum(exponents: Sequence[int], z: float, tol: float = 1e-12) -> tuple[float, float]:
    """``Z_e(z)`` for raw exponents ``e`` by cube-shell summation.

    Returns ``(value, error_estimate)``.  If any exponent is odd the sum
    vanishes by symmetry.  Shells are summed exactly up to a radius chosen so
    the crude tail bound ``2^p p int_R^inf r^(p-1+|e|-2z) dr`` is below ``tol``
    when that fits the point budget; otherwise the remaining tail is
    extrapolated from the smooth large-``r`` expansion of the shell sums
    ``s(r) = r^-q (c_0 + c_1/r + ...)`` and summed with Hurwitz zeta values.
    """
    e = _as_tuple(exponents)
    p, d = len(e), sum(e)
    if not 2.0 * z > p + d:
        raise ValueError(f"lattice sum diverges for z={z} (need z > {(p + d) / 2})")
    if any(v % 2 for v in e):
        return 0.0, 0.0
    decay = 2.0 * z - d - p  # tail of shell sums ~ R^-decay
    cap = 100_000 if p == 1 else int((_POINT_BUDGET ** (1.0 / p) - 1))
    bound_radius = (2.0**p * p / (decay * tol)) ** (1.0 / decay)
    if bound_radius <= cap:
        radius = max(int(math.ceil(bound_radius)), 8)
        shells = _shell_sums(e, z, radius)
        return math.fsum(shells), tol
    radius = cap
    shells = _shell_sums(e, z, radius)
    head = math.fsum(shells)
    q = decay + 1.0
    fit_len = min(80, radius // 2)
    r = np.arange(radius - fit_len + 1, radius + 1, dtype=float)
    y = shells[radius - fit_len + 1:] * r**q
    tails = []
    for degree in (4, 6):
        basis = np.vstack([(radius / r) ** j for j in range(degree + 1)]).T
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        tails.append(sum(c * radius**j * sps.zeta(q + j, radius + 1) for j, c in enumerate(coef)))
    err = abs(tails[1] - tails[0]) + 1e-15 * abs(head)
    return head + tails[1], err


def z_series_direct(q: DirichletQuery, tol: float = 1e-12) -> float:
    """``Z_{2a}(z)`` by direct lattice summation (needs ``z`` beyond the pole)."""
    if not q.z > q.pole:
        raise ValueError(f"z={q.z} is outside the region of absolute convergence (> {q.pole})")
    return lattice_sum(tuple(2 * v for v in q.a), q.z, tol)[0]


# ---------------------------------------------------------------------------
# analytic continuation
# ---------------------------------------------------------------------------

def _product_minus_one(factors: Sequence[float]) -> float:
    """``prod(1 + f) - 1`` without cancellation for small ``f``."""
    acc = 0.0
    for f in factors:
        acc = acc + f + acc * f
    return acc


def _theta_product(a: tuple[int, ...], t: float) -> float:
    """``prod_j vartheta_{2a_j}(t) - [a = 0]`` for ``t >= 1``."""
    if not any(a):
        return _product_minus_one([theta_tail(0, t)] * len(a))
    out = 1.0
    for v in a:
        out *= theta_tail(2 * v, t) + (1.0 if v == 0 else 0.0)
    return out


@lru_cache(maxsize=None)
def _leading_coefficients(b: int) -> tuple[float, ...]:
    lead = reciprocity_coefficient(2 * b, b)
    return tuple(reciprocity_coefficient(2 * b, k) / lead for k in range(b + 1))


def _inverse_excess(b: int, t: float) -> float:
    """``vartheta_{2b}(1/t) / L_b(t) - 1`` with ``L_b`` the leading power term."""
    coefs = _leading_coefficients(b)
    out = theta_tail(0, t)
    scale = t / math.pi
    for k in range(b):
        out += coefs[k] * scale ** (b - k) * theta_tail(2 * (b - k), t)
    return out


def _inverse_product_excess(a: tuple[int, ...], t: float) -> float:
    """``prod_j vartheta_{2a_j}(1/t) / (K t^{p/2+|a|}) - 1`` for ``t >= 1``."""
    return _product_minus_one([_inverse_excess(v, t) for v in a])


def leading_constant(a: Sequence[int]) -> float:
    """``K = (-pi)^{|a|} prod (2a_j)!/a_j!``: ``prod vartheta_{2a_j}(1/t) ~ K t^{p/2+|a|}``."""
    out = (-math.pi) ** sum(a)
    for v in a:
        out *= math.factorial(2 * v) / math.factorial(v)
    return out


def _cutoff(f, start: float = 1.0) -> float:
    """A point beyond which the exponentially decaying ``f`` is negligible."""
    peak = abs(f(start))
    t = start
    prev = peak
    while True:
        t += 2.0
        val = abs(f(t))
        peak = max(peak, val)
        if val < prev and val <= 1e-18 * peak:
            return t
        if t > 2000.0:
            raise ConvergenceError("integrand does not decay")
        prev = val


def _integrate(f, lo: float, hi: float) -> tuple[float, float]:
    edges = [lo]
    while edges[-1] < hi:
        edges.append(min(hi, edges[-1] * 2.0 if edges[-1] >= 2.0 else edges[-1] + 1.0))
    total = 0.0
    err = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        out = integrate.quad(f, x0, x1, epsabs=0.0, epsrel=QUAD_REL_TOL, limit=200, full_output=1)
        val, e = out[0], out[1]
        if len(out) > 3:
            # roundoff-limited panel: fall back to a conservative estimate
            e = max(e, 1e-12 * abs(val))
        total += val
        err += e
    return total, err


@lru_cache(maxsize=4096)
def entire_integrals(a: tuple[int, ...], z: float) -> tuple[float, float]:
    """``I_1(z) + I_2(z)`` of the continuation formula and an error estimate.

    ``I_1 = int_1^inf t^{z-1} (prod vartheta_{2a_j}(t) - [a=0]) dt`` and
    ``I_2 = int_1^inf t^{-z-1} (prod vartheta_{2a_j}(1/t) - K t^{p/2+|a|}) dt``.
    Both are entire in ``z``.
    """
    a = tuple(sorted(a))
    p = len(a)
    k_const = leading_constant(a)
    shift = p / 2 + sum(a)

    def f1(t):
        return t ** (z - 1.0) * _theta_product(a, t)

    def f2(t):
        return k_const * t ** (shift - z - 1.0) * _inverse_product_excess(a, t)

    v1, e1 = _integrate(f1, 1.0, _cutoff(f1))
    v2, e2 = _integrate(f2, 1.0, _cutoff(f2))
    return v1 + v2, e1 + e2


def gamma_z(a: Sequence[int], w: float) -> float:
    """``Gamma(w) Z_{2a}(w)`` from the continuation formula.

    Poles: ``w = p/2 + |a|`` always, and ``w = 0`` when ``a = 0``.
    """
    a = _as_tuple(a)
    norm = sum(a)
    pole = len(a) / 2 + norm
    if w == pole or (norm == 0 and w == 0):
        raise PoleError(f"Gamma*Z has a pole at {w}")
    ints, _ = entire_integrals(a, float(w))
    out = math.pi ** (w - norm) * pole_weight(a) / (w - pole)
    out += math.pi ** (w - 2 * norm) / (-4.0) ** norm * ints
    if norm == 0:
        out -= math.pi**w / w
    return out


def z_continued(q: DirichletQuery, tol: float = QUAD_REL_TOL) -> float:
    """``Z_{2a}(z)`` for any real ``z`` except the pole ``p/2 + |a|``."""
    a, z = q.a, float(q.z)
    norm = sum(a)
    if z == q.pole:
        raise PoleError(f"Z_{{2a}} has its pole at z={z}")
    ints, err = entire_integrals(tuple(sorted(a)), z)
    if err > max(tol, 1e-10) * max(1.0, abs(ints)):
        raise ConvergenceError(f"quadrature error estimate {err:g} too large")
    rg = rgamma(z)
    out = rg * (math.pi ** (z - norm) * pole_weight(a) / (z - q.pole)
                + math.pi ** (z - 2 * norm) / (-4.0) ** norm * ints)
    if norm == 0:
        out -= math.pi**z * rgamma(z + 1.0)
    return out


def z_residue(p: int, a: Sequence[int]) -> float:
    """Residue of ``Z_{2a}`` at its only pole ``p/2 + |a|``."""
    a = _as_tuple(a)
    if len(a) != p:
        raise ValueError("length of a must equal p")
    return math.pi ** (p / 2) * rgamma(p / 2 + sum(a)) * pole_weight(a)


def omega(k: int, a: Sequence[int], tol: float = QUAD_REL_TOL) -> float:
    """The constant ``omega_{k,a}`` multiplying ``n^{(k+1)/2}`` in ``g_{k,a}(n)``.

    Off the double-pole case this is ``Gamma(w) Z_{2a}(w) / 2`` at
    ``w = (k+1)/2 + |a|``.  When ``p = k + 1`` it is half the constant Laurent
    coefficient of ``Gamma(z+|a|) Z_{2a}(z+|a|)`` at ``z = p/2``, read off the
    continuation formula: the pole term contributes ``c pi^{p/2} log(pi)``.
    """
    a = tuple(sorted(_as_tuple(a)))
    p, norm = len(a), sum(a)
    if k < 0:
        raise ValueError("k must be non-negative")
    if p != k + 1:
        return 0.5 * gamma_z(a, (k + 1) / 2 + norm)
    w0 = p / 2 + norm
    ints, err = entire_integrals(a, w0)
    if err > max(tol, 1e-10) * max(1.0, abs(ints)):
        raise ConvergenceError(f"quadrature error estimate {err:g} too large")
    out = pole_weight(a) * math.pi ** (p / 2) * math.log(math.pi)
    out += math.pi ** (w0 - 2 * norm) / (-4.0) ** norm * ints
    if norm == 0:
        out -= math.pi**w0 / w0
    return 0.5 * out


# ---------------------------------------------------------------------------
# g and G
# ---------------------------------------------------------------------------

def _axis_sum(b: int, x: float, tol: float) -> float:
    """``sum_{l != 0} (x l)^{2b} exp(-(x l)^2)``."""
    # terms peak at (x l)^2 = b; go well past both
    l_max = int(math.ceil((math.sqrt(b) + math.sqrt(-math.log(tol) + 2 * b + 10)) / x)) + 2
    u = x * np.arange(1, l_max + 1, dtype=float)
    u2 = u * u
    return 2.0 * math.fsum(u2**b * np.exp(-u2))


def _lattice_gauss(a: tuple[int, ...], x: float, tol: float) -> float:
    """``sum_{m in Z^p, m != 0} prod_j (x m_j)^{2a_j} exp(-(x m_j)^2)``."""
    if not any(a):
        e = _axis_sum(0, x, tol)
        return math.expm1(len(a) * math.log1p(e))
    out = 1.0
    for v in a:
        out *= _axis_sum(v, x, tol) + (1.0 if v == 0 else 0.0)
    return out


def _h_terms(weight, a: tuple[int, ...], n: float, tol: float) -> list[float]:
    p = len(a)
    sqrt_n = math.sqrt(n)
    # inner sum <~ p exp(-(h+1)^2/n) up to polynomial factors
    h_stop = math.sqrt(n * (math.log(max(p * n, 2.0) / tol) + 40.0)) + 2
    terms = []
    h = 1
    while h + 1 <= h_stop or (terms and abs(terms[-1]) > tol * 1e-3 * abs(math.fsum(terms))):
        x = (h + 1) / sqrt_n
        terms.append(weight(h) * _lattice_gauss(a, x, tol))
        h += 1
    return terms


def g_exact(k: int, a: Sequence[int], n: float, tol: float = 1e-16) -> float:
    """``g_{k,a}(n) = sum_{h>=1} (h+1)^k sum_{m in (h+1)Z^p, m != 0} e^{-|m|^2/n} (m/sqrt n)^{2a}``."""
    a = _as_tuple(a)
    if not n > 0:
        raise ValueError("n must be positive")
    return math.fsum(_h_terms(lambda h: float(h + 1) ** k, a, float(n), tol))


def G_exact(s: int, a: Sequence[int], n: float, tol: float = 1e-16) -> float:
    """``G_{s,a}(n)``: as ``g`` but weighted by ``(h-1)^s - h^s``."""
    a = _as_tuple(a)
    if s < 1:
        raise ValueError("s must be >= 1")
    return math.fsum(_h_terms(lambda h: float((h - 1) ** s - h**s), a, float(n), tol))


def G_expansion(s: int, a: Sequence[int], n: float, tol: float = 1e-16) -> float:
    """``G_{s,a}`` through ``sum_k C(s,k) (2^{s-k}-1) (-1)^{s-k} g_{k,a}``."""
    return math.fsum(math.comb(s, k) * (2 ** (s - k) - 1) * (-1) ** (s - k) * g_exact(k, a, n, tol)
                     for k in range(s))


def big_omega(k: int, p: int, n: float) -> float:
    """``Omega_k(n)``: ``(n pi)^{p/2}`` times ``gamma - 1 + log sqrt n`` if
    ``p = k + 1`` and ``zeta(p - k) - 1`` otherwise."""
    factor = (n * math.pi) ** (p / 2)
    if p == k + 1:
        return factor * (EULER_GAMMA - 1.0 + 0.5 * math.log(n))
    return factor * (zeta(p - k) - 1.0)


def g_asymptotic(k: int, a: Sequence[int], n: float, tol: float = QUAD_REL_TOL) -> float:
    """Asymptotic expansion of ``g_{k,a}(n)``, exact up to ``O(n^-M)`` for all ``M``."""
    a = _as_tuple(a)
    p = len(a)
    out = pole_weight(a) * big_omega(k, p, n) + omega(k, a, tol) * n ** ((k + 1) / 2)
    if not any(a):
        out += 1.0 - float(bernoulli(k + 1)) * (-1) ** k / (k + 1)
    return out
