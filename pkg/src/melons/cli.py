"""Command-line front end.

Every subcommand writes one JSON object to stdout (``pmf --format csv``
writes CSV instead)::

    {"command": ..., "inputs": {...}, "result": ..., "err_estimate": ..., "wall_time_ms": ...}

Exact integers and rationals are serialized as decimal strings.  Diagnostics
go to stderr.  Exit codes: 0 success, 1 usage error, 2 tolerance or
convergence failure, 3 resource limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from decimal import Decimal, localcontext
from fractions import Fraction

from . import asymptotics as asy
from . import exact as ex
from . import sampler as sm
from .errors import ConvergenceError, ResourceLimitError
from .verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_TOL, EXIT_RESOURCE = 0, 1, 2, 3

# requests beyond these sizes would run for hours or exhaust memory
MAX_EXACT_N = 100_000
MAX_SAMPLE_COUNT = 10_000_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _decimal17(value: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 17
        d = Decimal(value.numerator) / Decimal(value.denominator)
        return format(d, ".17g")


def _fraction_str(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _spec(args) -> ex.WatermelonSpec:
    if args.n > MAX_EXACT_N:
        raise ResourceLimitError(f"n = {args.n} exceeds the exact-computation limit {MAX_EXACT_N}")
    return ex.WatermelonSpec(args.p, args.n)


# ---------------------------------------------------------------------------
# subcommands: each returns (result, err_estimate)
# ---------------------------------------------------------------------------

def _cmd_count(args):
    spec = _spec(args)
    if args.max_height is None:
        return str(ex.count_total(spec).value), None
    return str(ex.count_bounded(spec, args.max_height).value), None


def _pmf_rows(args):
    dist = ex.height_pmf(_spec(args))
    return [{"h": h, "count": str(c), "probability": _decimal17(Fraction(c, dist.total))}
            for h, c in sorted(dist.counts.items())]


def _cmd_pmf(args):
    return _pmf_rows(args), None


def _cmd_moment(args):
    out = {}
    err = None
    if args.mode in ("exact", "both"):
        out["exact"] = _fraction_str(ex.exact_moment(_spec(args), args.s))
    if args.mode in ("asymptotic", "both"):
        out["asymptotic"] = asy.moment_asymptotic(args.p, args.n, args.s, args.tol)
        kap = asy.kappa(args.p, args.s, args.tol)
        err = args.s * kap.err_estimate * args.n ** (args.s / 2)
    if args.mode == "exact":
        return out["exact"], None
    if args.mode == "asymptotic":
        return out["asymptotic"], err
    return out, err


def _cmd_kappa(args):
    res = asy.kappa(args.p, args.s, args.tol)
    return res.value, res.err_estimate


def _cmd_cdf(args):
    if args.form == "exact":
        if args.n is None:
            raise UsageError("--n is required for --form exact")
        h = math.ceil(args.t * math.sqrt(args.n)) - 2
        return _fraction_str(ex.cdf_exact(_spec(args), max(h, 0))), None
    if args.form == "p1":
        if args.p != 1:
            raise UsageError("--form p1 is only defined for p = 1")
        return asy.limit_cdf_p1(args.t), None
    q = asy.LimitCdfQuery(args.p, args.t)
    if args.form == "det":
        return asy.limit_cdf_det(q, args.tol), None
    return asy.limit_cdf_schehr(q), None


def _cmd_sample(args):
    if args.count > MAX_SAMPLE_COUNT:
        raise ResourceLimitError(f"{args.count} draws exceed the limit {MAX_SAMPLE_COUNT}")
    cfg = sm.SamplerConfig(_spec(args), args.seed, args.count)
    if args.stats:
        st = sm.empirical_height(cfg)
        return {"histogram": [{"h": h, "count": c} for h, c in st.histogram.items()],
                "sample_mean": st.sample_mean, "sample_var": st.sample_var, "count": st.count}, None
    draws = []
    for i in range(cfg.count):
        fam = sm.sample_watermelon(cfg, i)
        draws.append({"index": i, "height": ex.compute_height(fam), "steps": [list(r) for r in fam.steps]})
    return draws, None


def _cmd_verify(args):
    checks = run_suite(args.suite)
    rows = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    return rows, None


COMMANDS = {
    "count": _cmd_count, "pmf": _cmd_pmf, "moment": _cmd_moment, "kappa": _cmd_kappa,
    "cdf": _cmd_cdf, "sample": _cmd_sample, "verify": _cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="melons", description="Heights of watermelons with wall.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pn(p):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--n", type=int, required=True)

    c = sub.add_parser("count", help="number of watermelons")
    pn(c)
    c.add_argument("--max-height", type=int, default=None,
                   help="count only watermelons of height strictly below this bound")

    c = sub.add_parser("pmf", help="exact height distribution")
    pn(c)
    c.add_argument("--format", choices=("json", "csv"), default="json")

    c = sub.add_parser("moment", help="height moment")
    pn(c)
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--mode", choices=("exact", "asymptotic", "both"), default="exact")
    c.add_argument("--tol", type=float, default=asy.KAPPA_TOL)

    c = sub.add_parser("kappa", help="leading moment constant kappa_s")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--s", type=float, required=True)
    c.add_argument("--tol", type=float, default=asy.KAPPA_TOL)

    c = sub.add_parser("cdf", help="limit law of (H + 2)/sqrt(n)")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--form", choices=("det", "schehr", "p1", "exact"), default="det")
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--tol", type=float, default=asy.CDF_TOL)

    c = sub.add_parser("sample", help="uniform random watermelons")
    pn(c)
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--stats", action="store_true")

    c = sub.add_parser("verify", help="run property suites")
    c.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    c.add_argument("--tol", type=float, default=None, help="accepted for uniformity; suites use fixed tolerances")
    return parser


def _emit(args, result, err, started, stdout) -> None:
    inputs = {k: v for k, v in vars(args).items() if k != "command"}
    if args.command == "pmf" and args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "count", "probability"])
        for row in result:
            w.writerow([row["h"], row["count"], row["probability"]])
        stdout.write(buf.getvalue())
        return
    record = {"command": args.command, "inputs": inputs, "result": result, "err_estimate": err,
              "wall_time_ms": int(round((time.perf_counter() - started) * 1000))}
    stdout.write(json.dumps(record) + "\n")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        result, err = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return EXIT_USAGE
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=stderr)
        return EXIT_RESOURCE
    except ConvergenceError as e:
        print(f"convergence failure: {e}", file=stderr)
        return EXIT_TOL
    except ValueError as e:
        print(f"invalid input: {e}", file=stderr)
        return EXIT_USAGE
    _emit(args, result, err, started, stdout)
    if args.command == "verify" and not all(r["passed"] for r in result):
        for r in result:
            if not r["passed"]:
                print(f"FAILED: {r['name']} ({r['detail']})", file=stderr)
        return EXIT_TOL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
