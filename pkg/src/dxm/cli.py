"""Command-line front end.

Exit codes: 0 decisive verdict / check passed, 1 usage or input error,
2 numeric failure, 3 Unknown verdict.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import discdyn as dd
from . import endocheck as ec
from . import report
from .domain import DomainError, DomainSpec, sup_norm
from .jets import JetError
from .parsing import ParseError, map_from_parts, parse_map, parse_rational
from .poly import RootFindingError
from .repro import FixtureError, run_suite
from .weightforge import (ConstructionError, HypothesisError, VerificationError,
                          construct_thm3, construct_thm5, verify_construction)
from .weights import WeightError, load_weight_file, parse_weight, weight_report

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_UNKNOWN = 0, 1, 2, 3

USAGE_ERRORS = (ParseError, FixtureError, WeightError, dd.SelfMapError, OSError)
NUMERIC_ERRORS = (RootFindingError, dd.DenjoyWolffError, dd.DegreeCapError, DomainError,
                  ConstructionError, VerificationError, ec.PreconditionError, HypothesisError,
                  JetError, FloatingPointError, OverflowError, ZeroDivisionError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _domain(args) -> DomainSpec:
    kw = {"boundary_samples": args.samples}
    return DomainSpec.interval(**kw) if args.domain == "interval" else DomainSpec.disc(**kw)


def _map(args, X, validate=True):
    if args.map and args.num:
        raise UsageError("give either --map or --num/--den, not both")
    if args.map:
        return parse_map(args.map, X, validate)
    if args.num:
        return map_from_parts(args.num, args.den or "1", X, validate)
    raise UsageError("a map is required (--map or --num/--den)")


def _weight(args):
    if getattr(args, "weight_file", None):
        if args.weight != "n!^2":
            raise UsageError("give either --weight or --weight-file, not both")
        return load_weight_file(args.weight_file)
    return parse_weight(args.weight)


def _emit(doc, args):
    text = report.dumps(doc)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _map_args(p, with_domain=True):
    p.add_argument("--map", help='rational map in z, e.g. "(1 - z^3)/2"')
    p.add_argument("--num", help="numerator: polynomial in z or ascending coefficients a0,a1,...")
    p.add_argument("--den", help="denominator (default 1)")
    if with_domain:
        _domain_args(p)


def _domain_args(p):
    p.add_argument("--domain", choices=("disc", "interval"), default="disc")
    p.add_argument("--samples", type=int, default=2048, help="boundary samples")


def _weight_args(p):
    p.add_argument("--weight", default="n!^2", help="n!^a | n!log^n | n!n^n2 (default n!^2)")
    p.add_argument("--weight-file", help="JSON file {name, log_m: [...]}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dxm", description="Composition endomorphisms of D(X, M) algebras.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    wp = sub.add_parser("weights", help="weight-sequence tools")
    wsub = wp.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    wc = wsub.add_parser("check", help="algebra, nonanalyticity and thm1b checks")
    _weight_args(wc)
    wc.add_argument("--upto", type=int, default=40)
    wc.add_argument("--out")

    dp = sub.add_parser("domain", help="domain tools")
    dsub = dp.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    ds = dsub.add_parser("supnorm", help="sampled sup norm of a rational function")
    ds.add_argument("--expr", required=True)
    ds.add_argument("--not-analytic", action="store_true", help="also sample the interior")
    _domain_args(ds)
    ds.add_argument("--out")

    cp = sub.add_parser("classify", help="fixed-point classification on the closed disc")
    _map_args(cp, with_domain=False)
    cp.add_argument("--samples", type=int, default=2048)
    cp.add_argument("--n-max", type=int, default=16)
    cp.add_argument("--out")

    ep = sub.add_parser("endo", help="endomorphism verdicts and witnesses")
    esub = ep.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    ec_ = esub.add_parser("check", help="run the rule cascade")
    _map_args(ec_)
    _weight_args(ec_)
    ec_.add_argument("--n-max", type=int, default=16)
    ec_.add_argument("--all-rules", action="store_true", help="evaluate every rule")
    ec_.add_argument("--out")
    ew = esub.add_parser("witness", help="growth of ||F_R o phi|| / ||F_R||")
    _map_args(ew)
    _weight_args(ew)
    ew.add_argument("--b", required=True, help="point b (complex literal)")
    ew.add_argument("--R", default="1,2,4", help="comma-separated radii")
    ew.add_argument("--N", type=int, default=ec.TRUNCATION, help="truncation order")
    ew.add_argument("--csv", help="also write the table as CSV")
    ew.add_argument("--out")

    fp = sub.add_parser("forge", help="inductive weight constructions")
    fsub = fp.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name in ("thm3", "thm5"):
        f = fsub.add_parser(name)
        _map_args(f)
        f.add_argument("--nmax", type=int, default=10)
        if name == "thm5":
            f.add_argument("--b", required=True)
        f.add_argument("--out", help="weights.json destination")

    rp = sub.add_parser("repro", help="run the worked-example fixtures")
    rp.add_argument("--only", help="fixture id")
    rp.add_argument("--fixtures", help="alternative fixture file")
    rp.add_argument("--out")
    return ap


def _complex(text: str) -> complex:
    m = parse_rational(text)
    if len(m.num) > 1 or len(m.den) > 1:
        raise UsageError(f"{text!r} is not a constant")
    return complex(m(0.0))


def cmd_weights(args) -> int:
    w = _weight(args)
    rep = weight_report(w, args.upto)
    doc = report.build("weights", rep.to_json(), versioned=False)
    _emit(doc, args)
    return EXIT_OK if rep.algebra_ok else EXIT_NUMERIC


def cmd_supnorm(args) -> int:
    X = _domain(args)
    f = parse_rational(args.expr)
    s = sup_norm(f, X, analytic_hint=not args.not_analytic)
    _emit(report.build("supnorm", {"expr": args.expr, "value": s.value, "argmax": s.argmax,
                                   "resolution": s.resolution}), args)
    return EXIT_OK


def cmd_classify(args) -> int:
    X = DomainSpec.disc(boundary_samples=args.samples)
    phi = _map(args, X)
    c = dd.classify(phi, args.n_max)
    _emit(report.build("classification", c.to_json()), args)
    return EXIT_UNKNOWN if c.case is dd.Case.UNKNOWN else EXIT_OK


def cmd_endo_check(args) -> int:
    X = _domain(args)
    phi = _map(args, X)
    w = _weight(args)
    v = ec.full_verdict(phi, X, w, args.n_max, run_all=args.all_rules)
    doc = dict(v.to_json(), map=phi.to_text(), weight=w.name, domain=X.kind.value)
    if args.all_rules:
        doc["certificate"] = dict(doc["certificate"], conflict=ec.conflicting(v.evidence))
    _emit(report.build("verdict", doc), args)
    return EXIT_OK if v.decisive else EXIT_UNKNOWN


def cmd_endo_witness(args) -> int:
    X = _domain(args)
    phi = _map(args, X)
    w = _weight(args)
    try:
        R = [float(r) for r in args.R.split(",")]
    except ValueError:
        raise UsageError(f"bad radius list {args.R!r}")
    tab = ec.witness_growth_experiment(phi, X, w, _complex(args.b), R, args.N)
    rows = [r.__dict__ for r in tab.rows]
    doc = {"b": tab.b, "abs_dphi_b": tab.abs_dphi_b, "theta": tab.theta, "rows": rows,
           "monotone": tab.monotone, "under_truncated": tab.under_truncated,
           "growth_demonstrated": tab.growth_demonstrated,
           "truncation": {"N": args.N, **X.resolution()}}
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv(rows))
    _emit(report.build("witness", doc), args)
    return EXIT_OK


def cmd_forge(args) -> int:
    X = _domain(args)
    phi = _map(args, X)
    if args.sub == "thm3":
        cw = construct_thm3(phi, X, args.nmax)
    else:
        cw = construct_thm5(phi, X, _complex(args.b), args.nmax)
    ver = verify_construction(cw, phi, X)
    doc = dict(cw.to_json(), verification={"ok": ver.ok, "checks": sorted(ver.checks)})
    _emit(report.build("forge", doc), args)
    return EXIT_OK


def cmd_repro(args) -> int:
    rows = run_suite(args.only, args.fixtures)
    passed = sum(r.ok for r in rows)
    for r in rows:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.id:<24} {r.got}", file=sys.stderr)
    doc = {"passed": passed, "total": len(rows), "rows": [r.to_json() for r in rows]}
    _emit(report.build("repro", doc), args)
    return EXIT_OK if passed == len(rows) else EXIT_NUMERIC


HANDLERS = {
    ("weights", "check"): cmd_weights,
    ("domain", "supnorm"): cmd_supnorm,
    ("classify", None): cmd_classify,
    ("endo", "check"): cmd_endo_check,
    ("endo", "witness"): cmd_endo_witness,
    ("forge", "thm3"): cmd_forge,
    ("forge", "thm5"): cmd_forge,
    ("repro", None): cmd_repro,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = HANDLERS[(args.cmd, getattr(args, "sub", None))]
    try:
        return handler(args)
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"dxm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"dxm: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
