"""ri-kit command line.

Every command builds ScenarioReports and prints them in the chosen format.
Exit status: 0 when every check passes, 1 when any fails or a numerical
precondition is violated, 2 on usage or parse errors.
"""
import argparse
import math
import os
import sys
import time

import numpy as np

from . import transforms as tr
from .errors import ParseError, RiKitError, UnknownScenario
from .expr import parse_function
from .grid import DEFAULT_GRID, GridSpec
from .optrange import (fundamental_optimal_range, norm_optimal_banach, norm_optimal_quasi,
                       w_optimal_banach)
from .qcf import (check_B1, check_condition3, envelope, involution_i, involution_j,
                  upper_fundamental_index, validate_quasi_concave)
from .rearrange import DecreasingStepFn
from .report import FORMATS, ScenarioReport, emit_report
from .scenarios import T_PROBES, run_all, run_scenario, scenario_names

TRANSFORMS = ("tilde", "delta", "hat", "envelope", "j", "i")


def _grid(text):
    try:
        return GridSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _steps(text):
    """'x1:v1,x2:v2,...' -> DecreasingStepFn with value v_i on (x_{i-1}, x_i]."""
    try:
        pairs = [p.split(":") for p in text.split(",") if p.strip()]
        x = [float(a) for a, _ in pairs]
        v = [float(b) for _, b in pairs]
        return DecreasingStepFn(x, v)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad step function {text!r}: {exc}")


def _fn(src, grid):
    return validate_quasi_concave(parse_function(src), grid, provenance=src)


def _values(rep, label, f, ts):
    for t in ts:
        v = float(f(t))
        rep.add(f"{label} at t={t:g}", None, v, "finite", math.isfinite(v), t)


def _curve(rep, label, f, grid):
    t = grid.nodes()
    rep.curves[label] = (t, np.asarray(f(t), dtype=float))


def cmd_eval(args, grid):
    f = parse_function(args.expr)
    rep = ScenarioReport(f"eval {args.expr}")
    _values(rep, f.pretty(), f, args.at)
    _curve(rep, args.expr, f, grid)
    return [rep]


def _transform(kind, phi, grid):
    if kind == "tilde":
        return tr.tilde(phi, grid)
    if kind == "delta":
        return tr.delta(phi, grid)
    if kind == "hat":
        return tr.hat(phi, grid)
    if kind == "envelope":
        return envelope(phi, grid)
    if kind == "j":
        return involution_j(phi, grid)
    return involution_i(phi, grid)


def cmd_transform(args, grid):
    phi = _fn(args.expr, grid)
    out = _transform(args.kind, phi, grid)
    rep = ScenarioReport(f"transform {args.kind} {args.expr}")
    rep.holds("result is quasi-concave on the grid", True)
    _values(rep, f"{args.kind}({args.expr})", out, args.at)
    _curve(rep, f"{args.kind}({args.expr})", out, grid)
    return [rep]


def cmd_index(args, grid):
    est = upper_fundamental_index(_fn(args.expr, grid), grid)
    rep = ScenarioReport(f"index {args.expr}")
    rep.add("upper fundamental index in [0, 1]", "[0, 1]", est.value, "[0, 1+1e-6]",
            0.0 <= est.value <= 1.0 + 1e-6, est.witness_s)
    rep.add("sampled infimum", None, est.sampled_infimum, "", True)
    rep.add("asymptotic slope", None, est.asymptotic_slope, "", True)
    return [rep]


def cmd_check(args, grid):
    phi = _fn(args.expr, grid)
    rep = ScenarioReport(f"check {args.kind} {args.expr}")
    if args.kind == "cond3":
        r = check_condition3(phi, grid)
        rep.add("phi >= C t log(1+1/t) with C > 0", "C > 0", r.best_constant, "> 0", r.holds,
                r.witness_t)
    elif args.kind == "b1":
        r = check_B1(phi, grid)
        rep.add("(t/phi) * int_t^inf phi(r)/r^2 dr bounded", "finite", r.best_constant,
                "< inf", r.holds, r.witness_t)
    else:
        rep.equivalent("phi ~ W of M(tilde)", tr.check_thm45(phi, grid, args.window))
    return [rep]


def cmd_wfun(args, grid):
    phi = _fn(args.expr, grid)
    func = {"lambda": lambda t: tr.w_lambda(phi, t),
            "marc": lambda t: tr.w_marcinkiewicz(phi, t, grid),
            "weak": lambda t: tr.w_weak(phi, t, grid)}[args.kind]
    rep = ScenarioReport(f"wfun {args.kind} {args.expr}")
    ts = args.at
    vals = [float(func(t)) for t in ts]
    for t, v in zip(ts, vals):
        rep.add(f"W at t={t:g}", None, v, "computed", not math.isnan(v), t)
    rep.curves[f"W_{args.kind}({args.expr})"] = (np.array(ts), np.array(vals))
    return [rep]


def cmd_optrange(args, grid):
    phi = _fn(args.expr, grid)
    rep = ScenarioReport(f"optrange {args.kind} {args.expr}")
    for t in args.at:
        fstar = args.fstar if args.fstar is not None else DecreasingStepFn.indicator(t)
        if args.kind == "w":
            res = w_optimal_banach(phi, t, grid)
        elif args.kind == "fund":
            res = fundamental_optimal_range(phi, t, grid)
        elif args.kind == "norm":
            res = norm_optimal_banach(fstar, phi, grid)
        else:
            res = norm_optimal_quasi(fstar, phi, grid)
        rep.add(f"LP value at t={t:g}", None, res.value,
                f"violation {res.max_constraint_violation:.2g}",
                res.max_constraint_violation <= 1e-6, t)
        if args.fstar is not None:
            break
    return [rep]


def cmd_decompose(args, grid):
    phi = _fn(args.expr, grid)
    form = tr.bk_decompose(phi, grid, window=args.window)
    rep = ScenarioReport(f"decompose {args.expr}")
    rep.add("constant c", None, form.constant_c, "", True)
    rep.add("linear part sigma", None, form.slope_sigma, "", True)
    for tk, hk in form.nodes:
        rep.add("node (t_k, h_k)", None, hk, "", True, tk)
    rep.equivalent("reconstruction ~ phi", tr.equivalence(form, phi, grid, args.window))
    _curve(rep, f"decomposition({args.expr})", form, grid)
    return [rep]


def cmd_scenario(args, grid):
    timing = not args.no_timing
    if args.name == "all":
        return run_all(grid, args.window, timing)
    return [run_scenario(args.name, grid, args.window, timing)]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_grid, default=DEFAULT_GRID,
                        help="tmin,tmax,points (default 1e-8,1e8,2049)")
    common.add_argument("--window", type=float, default=tr.DEFAULT_WINDOW,
                        help="equivalence window (default 4)")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--out", help="write the report to PATH instead of stdout")
    common.add_argument("--no-timing", action="store_true",
                        help="report runtime_ms as 0 for reproducible output")

    p = argparse.ArgumentParser(prog="ri-kit",
                                description="Quasi-concave transforms and optimal-range checks.")
    sub = p.add_subparsers(dest="command", required=True)
    probes = ",".join(f"{t:g}" for t in T_PROBES)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "evaluate an expression")
    sp.add_argument("expr")
    sp.add_argument("--at", type=_floats, default=[1.0])

    sp = add("transform", cmd_transform, "tabulate a transform of a function")
    sp.add_argument("kind", choices=TRANSFORMS)
    sp.add_argument("expr")
    sp.add_argument("--at", type=_floats, default=list(T_PROBES))

    sp = add("index", cmd_index, "upper fundamental index")
    sp.add_argument("expr")

    sp = add("check", cmd_check, "admissibility and equivalence checks")
    sp.add_argument("kind", choices=("cond3", "b1", "thm45"))
    sp.add_argument("expr")

    sp = add("wfun", cmd_wfun, "fundamental function of the kernel range")
    sp.add_argument("kind", choices=("lambda", "marc", "weak"))
    sp.add_argument("expr")
    sp.add_argument("--at", type=_floats, default=list(T_PROBES), help=f"default {probes}")

    sp = add("optrange", cmd_optrange, "optimal-range linear programs")
    sp.add_argument("kind", choices=("w", "fund", "norm", "quasi"))
    sp.add_argument("expr")
    sp.add_argument("--at", type=_floats, default=[1.0])
    sp.add_argument("--fstar", type=_steps, default=None,
                    help="decreasing step f* as x1:v1,x2:v2,... (default: indicator of (0,t])")

    sp = add("decompose", cmd_decompose, "min-atom decomposition")
    sp.add_argument("expr")

    sp = add("scenario", cmd_scenario, "run a registered scenario or all of them")
    sp.add_argument("name", help="scenario name or 'all'")

    sub.add_parser("list", help="list registered scenarios").set_defaults(func=None)
    return p


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the exit flush
            sys.stdout = open(os.devnull, "w")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write("\n".join(scenario_names()) + "\n")
        return 0
    start = time.perf_counter()
    try:
        reports = args.func(args, args.grid)
    except (ParseError, UnknownScenario) as exc:
        print(f"ri-kit: error: {exc}", file=sys.stderr)
        return 2
    except RiKitError as exc:
        print(f"ri-kit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.command != "scenario":
        for r in reports:
            r.runtime_ms = 0.0 if args.no_timing else (time.perf_counter() - start) * 1e3
    _write(emit_report(reports, args.format), args.out)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
