"""Property suites run by ``melons verify`` and by the acceptance tests."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

from . import asymptotics as asy
from . import dirichlet as dz
from . import exact as ex
from . import special as sf

REFERENCE_KAPPA = {
    1: (math.sqrt(math.pi), 3.289, 6.391, 12.987),
    2: (2.577, 6.790, 18.282, 50.306),
    3: (3.207, 10.429, 34.371, 114.817),
    4: (3.742, 14.141, 53.939, 207.712),
    5: (4.215, 17.898, 76.536, 329.655),
}

# (k, a, n) comparisons of g_exact with its expansion, including p = k + 1
G_EXAMPLES = [(0, (0,), 100), (1, (1,), 64), (0, (0, 0), 100), (1, (0, 0), 400),
              (0, (1,), 100), (2, (0, 0, 0), 100), (3, (1, 1), 144)]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _check(name: str, passed: bool, detail: str) -> Check:
    return Check(name, bool(passed), detail)


def _a_vectors(p: int, max_norm: int) -> list[tuple[int, ...]]:
    return [a for a in itertools.product(range(max_norm + 1), repeat=p) if sum(a) <= max_norm]


def _sorted_vectors(p: int, max_norm: int) -> list[tuple[int, ...]]:
    return sorted({tuple(sorted(a)) for a in _a_vectors(p, max_norm)})


# ---------------------------------------------------------------------------

def reciprocity_suite() -> list[Check]:
    out = []
    worst = 0.0
    for a in range(0, 11, 2):
        for y in (0.3, 0.5, 1.0, 2.0, 3.0):
            lhs, rhs, scale = sf.corollary_sides(a, y)
            worst = max(worst, abs(lhs - rhs) / scale)
    out.append(_check("corollary residual < 1e-11 scale", worst < 1e-11, f"worst {worst:.2e}"))
    worst = 0.0
    for a in range(7):
        for x in (-1.0, -0.4, 0.0, 0.4, 1.0):
            for t in (0.6, 1.0, 1.7):
                lhs, rhs, scale = sf.proposition_sides(a, x, t)
                worst = max(worst, abs(lhs - rhs) / scale)
    out.append(_check("proposition residual < 1e-9 scale", worst < 1e-9, f"worst {worst:.2e}"))
    worst = 0.0
    for a in range(6):
        for y in (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0):
            lhs, rhs, scale = sf.hermite_sides(a, y)
            worst = max(worst, abs(lhs - rhs) / scale)
    out.append(_check("hermite form residual < 1e-10 scale", worst < 1e-10, f"worst {worst:.2e}"))
    return out


def dirichlet_suite() -> list[Check]:
    out = []
    worst = 0.0
    for a in range(3):
        for z in (2.0, 3.5):
            v = dz.z_continued(dz.DirichletQuery((a,), z))
            worst = max(worst, abs(v - 2 * sf.zeta(2 * z - 2 * a)))
    out.append(_check("p=1 reduction to 2 zeta(2z-2a) within 1e-9", worst < 1e-9, f"worst {worst:.2e}"))

    worst = 0.0
    for p in (1, 2, 3):
        for a in _sorted_vectors(p, 2):
            for k in (0, 1, 2):
                v = dz.z_continued(dz.DirichletQuery(a, -k))
                expect = -1.0 if (k == 0 and not any(a)) else 0.0
                worst = max(worst, abs(v - expect))
    out.append(_check("special values at z = 0, -1, -2 within 1e-9", worst < 1e-9, f"worst {worst:.2e}"))

    worst = 0.0
    h = 1e-4
    for p in (1, 2, 3):
        for a in _sorted_vectors(p, 2):
            q0 = dz.DirichletQuery(a, 0.0)
            z0 = q0.pole
            up = h * dz.z_continued(dz.DirichletQuery(a, z0 + h))
            dn = -h * dz.z_continued(dz.DirichletQuery(a, z0 - h))
            res = dz.z_residue(p, a)
            worst = max(worst, abs(0.5 * (up + dn) - res) / res)
    out.append(_check("residue extrapolation within 1e-5 relative", worst < 1e-5, f"worst {worst:.2e}"))

    worst = 0.0
    for p in (1, 2, 3):
        for a in _sorted_vectors(p, 2):
            pole = p / 2 + sum(a)
            for z in (pole + 1.0, pole + 2.5):
                q = dz.DirichletQuery(a, z)
                d = dz.z_series_direct(q)
                c = dz.z_continued(q)
                worst = max(worst, abs(d - c) / max(1.0, abs(c)))
    out.append(_check("direct series = continuation within 1e-8", worst < 1e-8, f"worst {worst:.2e}"))

    worst = 0.0
    for a in [(0, 1, 2), (2, 0), (1, 0, 0)]:
        vals = [dz.z_continued(dz.DirichletQuery(perm, 0.7)) for perm in set(itertools.permutations(a))]
        worst = max(worst, (max(vals) - min(vals)) / max(1.0, max(abs(v) for v in vals)))
    out.append(_check("permutation symmetry", worst < 1e-12, f"spread {worst:.2e}"))

    worst = 0.0
    for k, a in [(0, (0,)), (1, (0, 0)), (2, (0, 0, 0))]:
        z0 = len(a) / 2
        h = 1e-3
        vals = []
        for step in (h, h / 10):
            gz = [dz.gamma_z(a, z0 + sign * step) for sign in (1, -1)]
            vals.append(0.5 * (gz[0] + gz[1]))
        # symmetric average removes the pole; Richardson removes the h^2 term
        limit = vals[1] + (vals[1] - vals[0]) / 99.0
        worst = max(worst, abs(0.5 * limit - dz.omega(k, a)) / abs(dz.omega(k, a)))
    out.append(_check("omega finite part vs numerical limit", worst < 1e-7, f"worst {worst:.2e}"))
    return out


def identities_suite() -> list[Check]:
    out = []
    ok = True
    cases = [(p, n) for p in (1, 2) for n in range(6)] + [(3, n) for n in range(4)]
    for p, n in cases:
        spec = ex.WatermelonSpec(p, n)
        fams = ex.enumerate_all(spec)
        hist = ex.height_histogram(fams)
        dist = ex.height_pmf(spec)
        ok &= len(fams) == ex.count_total(spec).value == dist.total and hist == dist.counts
    out.append(_check("enumeration matches count_total and height_pmf", ok, f"{len(cases)} cases"))
    ok = all(ex.count_total(ex.WatermelonSpec(p, n)) == ex.count_total_closed(ex.WatermelonSpec(p, n))
             for p in range(1, 5) for n in range(31))
    out.append(_check("determinant count equals product formula (p<=4, n<=30)", ok, ""))

    worst = 0.0
    for k, a, n in G_EXAMPLES:
        worst = max(worst, abs(dz.g_exact(k, a, n) - dz.g_asymptotic(k, a, n)))
    out.append(_check("g exact vs asymptotic within 1e-6", worst < 1e-6, f"worst {worst:.2e}"))

    ok = True
    for p in (1, 2):
        for k in range(4):
            for a in _a_vectors(p, 2):
                diffs, floors = [], []
                for n in (25, 100, 400):
                    ge = dz.g_exact(k, a, n)
                    diffs.append(abs(ge - dz.g_asymptotic(k, a, n)))
                    floors.append(1e-13 * abs(ge))
                for i, n in enumerate((25, 100, 400)[1:], start=1):
                    scaled_now = diffs[i] * n**3
                    scaled_before = diffs[i - 1] * (n // 4) ** 3
                    ok &= scaled_now < scaled_before or diffs[i] <= floors[i]
    out.append(_check("g remainder decays faster than n^-3", ok, "n = 25, 100, 400"))

    worst = 0.0
    for s, a, n in [(1, (0,), 50), (2, (0,), 50), (3, (1, 0), 36), (4, (1, 1), 80), (2, (0, 0, 0), 20)]:
        g1 = dz.G_exact(s, a, n)
        g2 = dz.G_expansion(s, a, n)
        worst = max(worst, abs(g1 - g2) / max(1.0, abs(g1)))
    out.append(_check("G expansion identity", worst < 1e-12, f"worst {worst:.2e}"))

    worst = 0.0
    for p in (1, 2, 3):
        for k in range(1, 5):
            kv = asy.kappa(p, k).value
            worst = max(worst, abs(kv - asy.lambda_sum(p, k) / asy.m_const(p)) / abs(kv))
    out.append(_check("kappa = lambda / M_p within 1e-5", worst < 1e-5, f"worst {worst:.2e}"))
    return out


def _moment_checks() -> list[Check]:
    out = []
    ns = (100, 400, 1600)
    for p in (1, 2):
        for s in (1, 2):
            res = [float(ex.exact_moment(ex.WatermelonSpec(p, n), s)) - asy.moment_asymptotic(p, n, s)
                   for n in ns]
            mags = [abs(r) for r in res]
            decreasing = mags[0] > mags[1] > mags[2]
            # predicted error order n^{s/2-1} + n^{p/2-p^2} log n
            def order(n):
                return n ** (s / 2 - 1) + n ** (p / 2 - p * p) * math.log(n)
            consistent = all(1 / 3 <= (mags[i + 1] / mags[i]) / (order(ns[i + 1]) / order(ns[i])) <= 3
                             for i in range(2))
            detail = ", ".join(f"{r:.4g}" for r in res)
            out.append(_check(f"moment residual p={p} s={s} decreasing", decreasing, detail))
            out.append(_check(f"moment residual p={p} s={s} matches error order", consistent, detail))
            if (p, s) == (1, 1):
                out.append(_check("moment residual p=1 s=1 n=1600 below 0.1", mags[2] < 0.1,
                                  f"{mags[2]:.4g}"))
    return out


def convergence_suite() -> list[Check]:
    out = []
    worst = 0.0
    for p in range(1, 6):
        for s in range(1, 5):
            worst = max(worst, abs(s * asy.kappa(p, s).value - REFERENCE_KAPPA[p][s - 1]))
    out.append(_check("s kappa_s matches reference constants within 5e-3", worst < 5e-3, f"worst {worst:.2e}"))
    diff = abs(asy.kappa(1, 1).value - math.sqrt(math.pi))
    out.append(_check("kappa_1 for p=1 equals sqrt(pi) within 1e-8", diff < 1e-8, f"{diff:.2e}"))

    out.extend(_moment_checks())

    worst = 0.0
    for p in (1, 2, 3):
        for t in (0.6, 1.0, 1.5, 2.5):
            q = asy.LimitCdfQuery(p, t)
            worst = max(worst, abs(asy.limit_cdf_det(q) - asy.limit_cdf_schehr(q)))
            if p == 1:
                worst = max(worst, abs(asy.limit_cdf_det(q) - asy.limit_cdf_p1(t)))
    out.append(_check("limit CDF forms agree within 1e-9", worst < 1e-9, f"worst {worst:.2e}"))

    ok = True
    ends = []
    grid = [round(0.2 + 0.1 * i, 10) for i in range(49)]
    for p in (1, 2, 3):
        vals = [asy.limit_cdf_det(asy.LimitCdfQuery(p, t)) for t in grid]
        ok &= all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        ok &= all(-1e-9 <= v <= 1 + 1e-9 for v in vals)
        ends.append(max(abs(vals[0]), abs(vals[-1] - 1)))
    out.append(_check("limit CDF monotone within [-1e-9, 1+1e-9]", ok, "t = 0.2 .. 5.0"))
    out.append(_check("limit CDF within 1e-6 of 0 and 1 at t = 0.2 and 5.0", max(ends) < 1e-6,
                      "end gaps " + ", ".join(f"p={p}: {e:.2e}" for p, e in zip((1, 2, 3), ends))))

    worst_ratio = 0.0
    for p in (1, 2):
        spec = ex.WatermelonSpec(p, 400)
        for t in (0.8, 1.2, 1.6):
            h = math.ceil(t * 20) - 2
            diff = abs(float(ex.cdf_exact(spec, h)) - asy.limit_cdf_det(asy.LimitCdfQuery(p, t)))
            worst_ratio = max(worst_ratio, diff / (50.0 / (400 * t)))
    out.append(_check("finite-n CDF within 50/(n t) of the limit at n=400", worst_ratio < 1,
                      f"worst fraction of bound {worst_ratio:.3f}"))

    ok = True
    for p in (1, 2, 3):
        errs = [abs(t ** (p * p + p / 2) * asy.t_det(p, t) / ((-math.pi) ** (p * p) * asy.m_const(p)) - 1)
                for t in (0.5, 0.25)]
        ok &= errs[1] <= errs[0] / 2
    out.append(_check("small-t determinant law", ok, ""))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "reciprocity": reciprocity_suite,
    "dirichlet": dirichlet_suite,
    "identities": identities_suite,
    "convergence": convergence_suite,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    return SUITES[name]()
