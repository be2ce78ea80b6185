import itertools
import math

import pytest

from melons.dirichlet import (DirichletQuery, G_exact, G_expansion, big_omega, g_asymptotic, g_exact,
                              gamma_z, lattice_sum, omega, pole_weight, z_continued, z_residue,
                              z_series_direct)
from melons.errors import PoleError
from melons.special import EULER_GAMMA, zeta

# closed forms via Z_{(0,0)}(z) = 4 zeta(z) beta(z), evaluated with mpmath at 40 digits
Z00_AT_3 = 4.658913615603843440161123907680531538588
Z00_AT_HALF = -3.900264920001955882845475336604973219209
Z20_AT_3 = 3.013406019845970061773130096364142791971  # 2 zeta(2) G
OMEGA_0_00 = -3.456519788504580553925093907134889561511
OMEGA_2_00 = 4.002919384958962131661721668196271953845
# log branch p = k + 1 = 2: 2 beta'(1) = (pi/2)(gamma + 2 log 2 + 3 log pi - 4 log Gamma(1/4))
OMEGA_1_00 = 0.385802633593824858726379528056


def Z(a, z):
    return z_continued(DirichletQuery(a, z))


def test_query_validation():
    with pytest.raises(ValueError):
        DirichletQuery((), 1.0)
    with pytest.raises(ValueError):
        DirichletQuery((-1,), 1.0)
    q = DirichletQuery([1, 0], 3)
    assert q.p == 2 and q.pole == 2.0


def test_direct_series_examples():
    assert z_series_direct(DirichletQuery((0,), 2.0)) == pytest.approx(math.pi**4 / 45, abs=1e-10)
    assert lattice_sum((1,), 3.0) == (0.0, 0.0)
    assert lattice_sum((2, 1, 0), 6.0)[0] == 0.0
    assert z_series_direct(DirichletQuery((0, 0), 3.0)) == pytest.approx(Z00_AT_3, rel=1e-10)
    assert z_series_direct(DirichletQuery((1, 0), 3.0)) == pytest.approx(Z20_AT_3, rel=1e-10)


def test_direct_series_rejects_divergent():
    with pytest.raises(ValueError):
        z_series_direct(DirichletQuery((0, 0), 1.0))
    with pytest.raises(ValueError):
        lattice_sum((2,), 1.4)


def test_continued_examples():
    assert Z((0,), 2.0) == pytest.approx(math.pi**4 / 45, rel=1e-12)
    assert Z((0, 0), -1.0) == pytest.approx(0.0, abs=1e-12)
    assert Z((0,), 0.0) == pytest.approx(-1.0, abs=1e-12)
    assert Z((0, 0), 3.0) == pytest.approx(Z00_AT_3, rel=1e-12)
    assert Z((0, 0), 0.5) == pytest.approx(Z00_AT_HALF, rel=1e-12)
    assert Z((1, 0), 3.0) == pytest.approx(Z20_AT_3, rel=1e-12)


def test_p1_reduction():
    for a in range(3):
        for z in (2.0, 3.5, 0.3, -1.7):
            assert Z((a,), z) == pytest.approx(2 * zeta(2 * z - 2 * a), rel=1e-11, abs=1e-12)


def test_pole_rejected():
    with pytest.raises(PoleError):
        Z((0, 1), 2.0)
    with pytest.raises(PoleError):
        gamma_z((0,), 0.0)


def test_special_values():
    for p in (1, 2, 3):
        for a in itertools.product(range(3), repeat=p):
            if sum(a) > 2:
                continue
            for k in (0, 1, 2):
                expect = -1.0 if (k == 0 and not any(a)) else 0.0
                assert abs(Z(a, -k) - expect) < 1e-9


def test_residue_examples():
    assert z_residue(1, (0,)) == pytest.approx(1.0, rel=1e-15)
    assert z_residue(2, (0, 0)) == pytest.approx(math.pi, rel=1e-15)
    assert z_residue(1, (1,)) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        z_residue(2, (0,))


def test_residue_extrapolation():
    for a in [(0,), (2,), (0, 0), (1, 1), (0, 0, 0), (0, 1, 1), (2, 0, 0)]:
        z0 = len(a) / 2 + sum(a)
        h = 1e-4
        est = 0.5 * (h * Z(a, z0 + h) - h * Z(a, z0 - h))
        assert est == pytest.approx(z_residue(len(a), a), rel=1e-5)


def test_permutation_symmetry():
    ref = Z((0, 1, 2), 1.3)
    for perm in itertools.permutations((0, 1, 2)):
        assert Z(perm, 1.3) == pytest.approx(ref, rel=1e-13)


def test_pole_weight():
    assert pole_weight((0, 0)) == 1.0
    assert pole_weight((1,)) == 0.5
    assert pole_weight((2, 1)) == pytest.approx(24 / (16 * 2) * 0.5)


def test_omega_examples():
    assert omega(2, (0,)) == pytest.approx(math.sqrt(math.pi) * zeta(3) / 2, rel=1e-13)
    assert omega(0, (0,)) == pytest.approx(math.sqrt(math.pi) / 2 * (EULER_GAMMA - 2 * math.log(2)), rel=1e-13)
    assert omega(3, (1, 0)) == pytest.approx(Z20_AT_3, rel=1e-12)
    assert omega(3, (1, 0)) == pytest.approx(0.5 * math.gamma(3) * z_series_direct(DirichletQuery((1, 0), 3.0)),
                                             rel=1e-10)
    assert omega(1, (0, 0)) == pytest.approx(OMEGA_1_00, rel=1e-13)
    assert omega(0, (0, 0)) == pytest.approx(OMEGA_0_00, rel=1e-13)
    assert omega(2, (0, 0)) == pytest.approx(OMEGA_2_00, rel=1e-13)


def test_omega_p1_closed_forms():
    for k in range(1, 5):
        for a in range(3):
            assert omega(k, (a,)) == pytest.approx(math.gamma((k + 1) / 2 + a) * zeta(k + 1), rel=1e-12)


def test_omega_finite_part_against_numerical_limit():
    for k, a in [(0, (0,)), (0, (1,)), (1, (0, 0)), (1, (1, 0)), (2, (0, 0, 0))]:
        z0 = len(a) / 2 + sum(a)
        vals = []
        for h in (1e-3, 1e-4):
            vals.append(0.25 * (gamma_z(a, z0 + h) + gamma_z(a, z0 - h)))
        limit = vals[1] + (vals[1] - vals[0]) / 99
        assert omega(k, a) == pytest.approx(limit, rel=1e-7)


def test_g_examples():
    assert g_exact(0, (0,), 0.01) < 1e-150
    assert abs(g_exact(0, (0,), 100) - g_asymptotic(0, (0,), 100)) < 1e-6
    assert abs(g_exact(1, (1,), 64) - g_asymptotic(1, (1,), 64)) < 1e-6
    n = 100
    expect = n * math.pi * (zeta(2) - 1) + omega(0, (0, 0)) * 10 + 1.5
    assert g_asymptotic(0, (0, 0), n) == pytest.approx(expect, rel=1e-14)
    n = 400
    expect = 400 * math.pi * (EULER_GAMMA - 1 + math.log(20)) + omega(1, (0, 0)) * 400 + 1 + 1 / 12
    assert g_asymptotic(1, (0, 0), n) == pytest.approx(expect, rel=1e-14)
    assert abs(g_exact(1, (0, 0), 400) - g_asymptotic(1, (0, 0), 400)) < 1e-6


def test_big_omega_branches():
    assert big_omega(0, 1, 1.0) == pytest.approx(math.sqrt(math.pi) * (EULER_GAMMA - 1))
    assert big_omega(2, 1, 4.0) == pytest.approx(2 * math.sqrt(math.pi) * (zeta(-1) - 1))


def test_g_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        g_exact(0, (0,), 0.0)


def test_G_examples():
    assert G_exact(1, (0,), 50) == pytest.approx(-g_exact(0, (0,), 50), rel=1e-15)
    assert G_exact(2, (0,), 50) == pytest.approx(-2 * g_exact(1, (0,), 50) + 3 * g_exact(0, (0,), 50), rel=1e-14)
    assert abs(G_exact(3, (1, 0), 36) - G_expansion(3, (1, 0), 36)) < 1e-8
    with pytest.raises(ValueError):
        G_exact(0, (0,), 10)
