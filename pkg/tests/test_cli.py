import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from melons.cli import run
from melons.exact import WatermelonSpec, height_pmf


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def record(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    assert err == ""
    rec = json.loads(out)
    assert set(rec) == {"command", "inputs", "result", "err_estimate", "wall_time_ms"}
    assert isinstance(rec["wall_time_ms"], int)
    return rec


def test_moment_exact():
    rec = record("moment", "--p", "1", "--n", "3", "--s", "2", "--mode", "exact")
    assert rec["result"] == "22/5"
    assert rec["command"] == "moment"
    assert rec["inputs"]["n"] == 3


def test_moment_both():
    rec = record("moment", "--p", "1", "--n", "50", "--s", "1", "--mode", "both")
    assert set(rec["result"]) == {"exact", "asymptotic"}
    assert Fraction(rec["result"]["exact"]) > 0
    assert rec["result"]["asymptotic"] == pytest.approx(math.sqrt(50 * math.pi) - 1.5)


def test_kappa():
    rec = record("kappa", "--p", "1", "--s", "1")
    assert rec["result"] == pytest.approx(math.sqrt(math.pi), abs=1e-8)
    assert rec["err_estimate"] < 1e-8


def test_count():
    assert record("count", "--p", "2", "--n", "5", "--max-height", "3")["result"] == "0"
    assert record("count", "--p", "1", "--n", "3")["result"] == "5"
    big = record("count", "--p", "3", "--n", "60")["result"]
    assert isinstance(big, str) and int(big) > 2**64


def test_pmf_json_and_csv():
    rows = record("pmf", "--p", "1", "--n", "3")["result"]
    assert [(r["h"], r["count"]) for r in rows] == [(1, "1"), (2, "3"), (3, "1")]
    code, out, err = call("pmf", "--p", "2", "--n", "8", "--format", "csv")
    assert code == 0 and err == ""
    table = list(csv.reader(io.StringIO(out)))
    assert table[0] == ["h", "count", "probability"]
    dist = height_pmf(WatermelonSpec(2, 8))
    assert {int(h): int(c) for h, c, _ in table[1:]} == dist.counts
    for h, c, prob in table[1:]:
        digits = prob.replace(".", "").replace("-", "").lstrip("0").split("e")[0]
        assert len(digits) <= 17
        assert float(prob) == pytest.approx(float(dist.probability(int(h))), rel=1e-15)


def test_cdf_forms():
    det = record("cdf", "--p", "2", "--t", "1.3")["result"]
    sch = record("cdf", "--p", "2", "--t", "1.3", "--form", "schehr")["result"]
    assert det == pytest.approx(sch, abs=1e-9)
    p1 = record("cdf", "--p", "1", "--t", "1.0", "--form", "p1")["result"]
    assert p1 == pytest.approx(record("cdf", "--p", "1", "--t", "1.0")["result"], abs=1e-12)
    exact = record("cdf", "--p", "1", "--t", "1.0", "--form", "exact", "--n", "9")["result"]
    assert 0 < Fraction(exact) < 1


def test_sample():
    rec = record("sample", "--p", "2", "--n", "4", "--count", "3", "--seed", "11")
    assert [d["index"] for d in rec["result"]] == [0, 1, 2]
    again = record("sample", "--p", "2", "--n", "4", "--count", "3", "--seed", "11")
    assert again["result"] == rec["result"]
    st = record("sample", "--p", "1", "--n", "5", "--count", "200", "--seed", "1", "--stats")["result"]
    assert st["count"] == 200
    assert sum(r["count"] for r in st["histogram"]) == 200


def test_verify_suite():
    code, out, err = call("verify", "--suite", "reciprocity")
    assert code == 0, err
    rows = json.loads(out)["result"]
    assert rows and all(r["passed"] for r in rows)


def test_usage_errors():
    for argv in (["nope"], ["count", "--p", "1"], ["pmf", "--p", "1", "--n", "2", "--format", "xml"],
                 ["cdf", "--p", "1", "--t", "1", "--form", "exact"], ["cdf", "--p", "2", "--t", "1", "--form", "p1"],
                 ["count", "--p", "0", "--n", "3"], ["sample", "--p", "1", "--n", "2", "--seed", "-4"]):
        code, out, err = call(*argv)
        assert code == 1, argv
        assert out == ""
        assert err


def test_convergence_exit():
    code, out, err = call("kappa", "--p", "2", "--s", "1", "--tol", "1e-30")
    assert code == 2 and out == "" and "convergence" in err


def test_resource_exit():
    code, out, err = call("sample", "--p", "1", "--n", "2", "--count", "100000000", "--seed", "1")
    assert code == 3 and out == "" and err
    code, out, err = call("pmf", "--p", "2", "--n", "1000000")
    assert code == 3 and out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "melons", "count", "--p", "2", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"] == "3"
    proc = subprocess.run([sys.executable, "-m", "melons", "bogus"], capture_output=True, text=True, check=False)
    assert proc.returncode == 1 and proc.stdout == ""
