import math
from fractions import Fraction

import pytest

from melons.errors import ResourceLimitError
from melons.exact import (PathFamily, WatermelonSpec, ballot_count, binomial, cdf_exact, compute_height,
                          count_bounded, count_total, count_total_closed, det_exact, enumerate_all,
                          exact_moment, height_histogram, height_pmf)


def spec(p, n):
    return WatermelonSpec(p, n)


def test_spec_validation():
    with pytest.raises(ValueError):
        WatermelonSpec(0, 3)
    with pytest.raises(ValueError):
        WatermelonSpec(2, -1)


def test_count_total_small():
    # Catalan numbers for p = 1
    assert [count_total(spec(1, n)).value for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]
    assert count_total(spec(2, 1)) == 1
    assert count_total(spec(2, 2)) == 3
    assert count_total(spec(3, 2)) == 4


def test_closed_form_agrees():
    for p in range(1, 5):
        for n in range(31):
            assert count_total(spec(p, n)) == count_total_closed(spec(p, n))


def test_det_exact():
    assert det_exact([[2, 1], [1, 3]]) == 5
    assert det_exact([[0, 1], [1, 0]]) == -1
    assert det_exact([]) == 1
    assert det_exact([[Fraction(1, 2), 1], [1, 4]]) == Fraction(1)
    assert det_exact([[1, 2], [2, 4]]) == 0
    with pytest.raises(ValueError):
        det_exact([[1, 2]])


def test_binomial_and_ballot():
    assert binomial(5, -1) == 0 and binomial(5, 6) == 0 and binomial(6, 3) == 20
    # Dyck paths 0 -> 0 in 6 steps
    assert ballot_count(0, 0, 6) == 5
    assert ballot_count(0, 1, 6) == 0
    assert ballot_count(2, 0, 2) == 1


def test_bounded_counts():
    s = spec(2, 5)
    assert count_bounded(s, 3) == 0
    for h in range(4):
        assert count_bounded(s, h) == 0
    assert count_bounded(s, 5 + 2 * 2 - 1) == count_total(s)
    assert count_bounded(s, 100) == count_total(s)
    # p = 1, n = 3: heights 1, 2, 2, 2, 3
    assert [count_bounded(spec(1, 3), h).value for h in range(5)] == [0, 0, 1, 4, 5]


def test_pmf_small():
    d = height_pmf(spec(1, 3))
    assert d.counts == {1: 1, 2: 3, 3: 1}
    assert d.total == 5
    assert d.probability(2) == Fraction(3, 5)
    assert d.cdf(2) == Fraction(4, 5)
    assert d.moment(2) == Fraction(22, 5)


def test_moment_matches_pmf():
    for p, n in ((1, 7), (2, 6), (3, 5)):
        d = height_pmf(spec(p, n))
        for s in (1, 2, 3):
            assert exact_moment(spec(p, n), s) == d.moment(s)


def test_cdf_exact():
    assert cdf_exact(spec(1, 3), 2) == Fraction(4, 5)
    assert cdf_exact(spec(1, 3), 3) == 1


def test_enumeration_matches():
    for p, n in [(1, n) for n in range(6)] + [(2, n) for n in range(6)] + [(3, n) for n in range(4)]:
        fams = enumerate_all(spec(p, n))
        assert len(fams) == count_total(spec(p, n)).value
        assert height_histogram(fams) == height_pmf(spec(p, n)).counts
        for f in fams:
            f.validate()


def test_enumeration_order_and_limit():
    fams = enumerate_all(spec(1, 3))
    flat = [tuple(s for row in f.steps for s in row) for f in fams]
    assert flat == sorted(flat)
    with pytest.raises(ResourceLimitError):
        enumerate_all(spec(1, 12), limit=100)


def test_degenerate_n0():
    s = spec(3, 0)
    assert count_total(s) == 1
    assert height_pmf(s).counts == {4: 1}
    assert exact_moment(s, 1) == 4
    fam = enumerate_all(s)[0]
    assert compute_height(fam) == 4


def test_validate_rejects_bad_families():
    s = spec(2, 1)
    with pytest.raises(ValueError):
        PathFamily(s, ((1, -1),)).validate()
    with pytest.raises(ValueError):
        PathFamily(s, ((-1, 1), (1, -1))).validate()  # below wall
    with pytest.raises(ValueError):
        PathFamily(s, ((1, -1), (-1, 1))).validate()  # branches touch
    with pytest.raises(ValueError):
        PathFamily(s, ((1, 1), (1, -1))).validate()  # wrong endpoint
    good = PathFamily(s, ((1, -1), (1, -1)))
    assert compute_height(good) == 3


def test_parallel_pmf_matches(monkeypatch):
    s = spec(2, 120)
    serial = height_pmf(s)
    monkeypatch.setenv("MELON_THREADS", "3")
    assert height_pmf(s) == serial


def test_large_n_is_fast():
    d = height_pmf(spec(2, 400))
    assert sum(d.counts.values()) == d.total
    assert min(d.counts) == 3 and max(d.counts) == 400 + 2
    # mean height grows like 2.577 sqrt(n)
    mean = float(d.moment(1))
    assert abs(mean - (2.5776 * math.sqrt(400) - 1.5)) < 0.5
