"""Command-line interface.

Exit codes: 0 success, 1 precondition failure or failed verification,
2 usage or input parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .approx import mollifier_convergence
from .corefn import Exponents, to_exponent, to_fraction
from .fofana import GridConfig, ScaleGrid, auto_grid, fofana_norm, phi_curve
from .hspace import PARTITIONS, hnorm_sandwich
from .io import SpecError, decomposition_to_dict, format_real, function_to_dict, load_function
from .norms import amalgam_norm, lebesgue_norm, morrey_norm, weak_norm
from .verify import SUITES, run_suite


class UsageError(Exception):
    pass


def _exponent(s: str):
    try:
        return to_exponent(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exponent: {s!r}") from exc


def _rational(s: str) -> Fraction:
    try:
        return to_fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from exc


def _float_list(s: str) -> list[float]:
    try:
        return [float(to_fraction(x)) for x in s.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {s!r}") from exc


def _g(x) -> str:
    return f"{float(x):.15g}"


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _exps(args) -> Exponents:
    _require(args, "q", "p", "alpha")
    return Exponents(args.q, args.p, args.alpha)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True)


def cmd_norm(args) -> int:
    f = load_function(args.input)
    kind = args.kind
    if kind == "lebesgue":
        _require(args, "q")
        out = {"value": float(lebesgue_norm(f, args.q))}
    elif kind == "weak":
        _require(args, "alpha")
        out = {"value": float(weak_norm(f, args.alpha))}
    elif kind == "amalgam":
        _require(args, "q", "p")
        out = {"value": float(amalgam_norm(f, args.q, args.p, args.rho)), "rho": str(args.rho)}
    elif kind == "morrey":
        _require(args, "q", "lam")
        est = morrey_norm(f, args.q, args.lam, window=args.window)
        w = est.best_witness or {}
        out = {"value": float(est.certified_lower), "exact": est.exact, "window": est.window,
               "evaluated_points": est.evaluated_points,
               "witness": {"center": [str(c) for c in w.get("center", ())],
                           "radius": str(w["radius"])} if w else None}
    else:
        exps = _exps(args)
        exps.require_ordered()
        cfg = GridConfig(args.points_per_decade, args.refine_iters)
        grid = None if f.is_zero() else auto_grid(f, exps, cfg)
        est = fofana_norm(f, exps, grid, cfg=cfg)
        out = {"value": float(est.certified_lower),
               "witness_rho": None if est.best_witness is None else str(est.best_witness),
               "exact": est.exact, "evaluated_points": est.evaluated_points}
        if grid is not None:
            out["grid"] = {"rho_min": str(grid.rho_min), "rho_max": str(grid.rho_max),
                           "points_per_decade": grid.points_per_decade}
    print(_dump(out))
    return 0


def cmd_curve(args) -> int:
    f = load_function(args.input)
    exps = _exps(args)
    auto = None if f.is_zero() else auto_grid(f, exps, GridConfig(args.points))
    if auto is None and (args.rho_min is None or args.rho_max is None):
        raise UsageError("an empty function needs --rho-min and --rho-max")
    rho_min = args.rho_min if args.rho_min is not None else auto.rho_min
    rho_max = args.rho_max if args.rho_max is not None else auto.rho_max
    # the function's distinguished scales are kept when they fall in range
    mandatory = () if auto is None else tuple(
        r for r in auto.mandatory_points if rho_min <= r <= rho_max)
    try:
        grid = ScaleGrid(rho_min, rho_max, args.points, mandatory)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rho", "amalgam", "phi"])
    for pt in phi_curve(f, exps, grid):
        writer.writerow([_g(pt.rho), _g(pt.amalgam), _g(pt.phi)])
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_hnorm(args) -> int:
    f = load_function(args.input)
    exps = _exps(args)
    exps.require_ordered()
    strategies = [s.strip() for s in args.partitions.split(",") if s.strip()]
    bad = [s for s in strategies if s not in PARTITIONS]
    if bad or not strategies:
        raise UsageError(f"unknown partition strategies {bad}; choose from {', '.join(PARTITIONS)}")
    if f.is_zero():
        raise ValueError("the pre-dual norm sandwich needs a nonzero function")
    cfg = GridConfig(args.points_per_decade, args.refine_iters)
    res = hnorm_sandwich(f, exps, cfg, strategies, seed=args.seed)
    out = {"lower": float(res.lower), "upper": float(res.upper),
           "certified_lower": res.certified_lower,
           "certified_value": float(res.certified_value),
           "lower_exact": format_real(res.lower), "upper_exact": format_real(res.upper),
           "witness": function_to_dict(res.best_witness) if res.best_witness else None,
           "decomposition": decomposition_to_dict(res.best_decomposition)}
    print(_dump(out))
    return 0


def cmd_mollify(args) -> int:
    f = load_function(args.input)
    exps = _exps(args)
    if f.dim != 1:
        raise ValueError("mollify supports d = 1 only")
    if not exps.q > 1:
        raise ValueError("mollifier convergence needs q > 1 (hypothesis 1 < q)")
    rows = mollifier_convergence(f, exps, args.eps_list, args.h, args.phi)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eps", "err"])
    for eps, err in rows:
        writer.writerow([_g(eps), _g(err)])
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_verify(args) -> int:
    faults = {args.inject_fault: True} if args.inject_fault else {}
    report = run_suite(args.suite, args.seed, args.cases, faults)
    for r in report.results:
        status = "ok  " if not r.failures else "FAIL"
        print(f"{status} [{r.suite}] {r.name}: {r.passed}/{r.run}  ({r.statement})")
    for fail in report.failures[:20]:
        print("failure: " + json.dumps(fail, sort_keys=True), file=sys.stderr)
    print(f"suite={report.suite} seed={report.seed} cases={report.cases_run} "
          f"failures={len(report.failures)} time={report.wall_time:.1f}s")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predual", description="Norms of amalgam, Morrey and Fofana spaces on step functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def exps_flags(p, lam=False):
        p.add_argument("--q", type=_exponent)
        p.add_argument("--p", type=_exponent)
        p.add_argument("--alpha", type=_exponent)

    def grid_flags(p):
        p.add_argument("--points-per-decade", type=int, default=64)
        p.add_argument("--refine-iters", type=int, default=40)

    p = sub.add_parser("norm", help="evaluate one norm")
    p.add_argument("input")
    p.add_argument("--kind", required=True,
                   choices=("lebesgue", "weak", "amalgam", "morrey", "fofana"))
    exps_flags(p)
    p.add_argument("--rho", type=_rational, default=Fraction(1))
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--window", choices=("ball", "cube"), default="ball")
    grid_flags(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("curve", help="CSV of rho, amalgam norm and weighted norm")
    p.add_argument("input")
    exps_flags(p)
    p.add_argument("--rho-min", type=_rational)
    p.add_argument("--rho-max", type=_rational)
    p.add_argument("--points", type=int, default=64, help="points per decade")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("hnorm", help="two-sided estimate of the pre-dual norm")
    p.add_argument("input")
    exps_flags(p)
    p.add_argument("--partitions", default=",".join(PARTITIONS))
    p.add_argument("--seed", type=int, default=0)
    grid_flags(p)
    p.set_defaults(func=cmd_hnorm)

    p = sub.add_parser("mollify", help="CSV of eps, ||f * phi_eps - f||_{q',p'}")
    p.add_argument("input")
    exps_flags(p)
    p.add_argument("--phi", choices=("box", "triangle"), default="box")
    p.add_argument("--eps-list", type=_float_list, required=True)
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=cmd_mollify)

    p = sub.add_parser("verify", help="run the property batteries")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--inject-fault", choices=("atom-norm",))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SpecError, FileNotFoundError) as exc:
        print(f"predual: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"predual: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
