"""Command-line entry point: fit, sweep-cpi, compare, oracle, trace.

Inputs are ``fixture:NAME``, ``cpi:LxSy`` or a CSV path. Results go to
stdout and diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .core import LineParams
from .datasets import all_cpi_windows, fixture, load_csv, window
from .errors import CyclingDetected, InputError, L1LineError, NumericalFailure
from .oracle import brute_force_best
from .pivoting import ColumnPolicy
from .solver import FitReport, StartMode, Strategy, StrategyOptions, fit
from .tableau import CondensedTableau

EXIT_OK, EXIT_CYCLING, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4
TRACE_LIMIT = 50
ORACLE_CAP = 2000


class UsageError(InputError):
    pass


def load_input(spec: str, weights: str = "embedded"):
    if spec.startswith("fixture:"):
        ds = fixture(spec[len("fixture:"):])
    elif spec.startswith("cpi:"):
        ds = window(spec[len("cpi:"):])
    else:
        try:
            ds = load_csv(spec)
        except OSError as exc:
            raise UsageError(f"cannot read {spec}: {exc.strerror or exc}") from exc
    if weights == "uniform":
        ds = ds.with_weights(None)
    return ds


def _parse_start(text: str) -> StartMode:
    if text in ("cold", "l2"):
        return StartMode(text)
    if text.startswith("trial"):
        body = text[len("trial"):].lstrip(":= ")
        try:
            a1, a2 = (float(x) for x in body.split(","))
        except ValueError:
            raise UsageError(f"trial start wants 'trial A1,A2', got {text!r}") from None
        return StartMode.trial(LineParams(a1, a2))
    raise UsageError(f"unknown start {text!r}")


def _options(args) -> StrategyOptions:
    start = " ".join(args.start)
    return StrategyOptions(
        strategy=Strategy(args.strategy),
        start=_parse_start(start),
        column_policy=ColumnPolicy(args.column),
        tol=args.toler,
        scaling=args.scale,
        degenerate_flip=not args.no_flip,
    )


def _num(x: float) -> float:
    # json writes repr(), which round-trips (17 significant digits at most)
    return float(x)


def report_to_dict(rep: FitReport, source: str, opts: StrategyOptions) -> dict:
    return {
        "input": source,
        "options": {
            "strategy": opts.strategy.value,
            "start": str(opts.start),
            "column": opts.column_policy.value,
            "toler": opts.tol,
            "scale": opts.scaling,
            "degenerate_flip": opts.degenerate_flip,
        },
        "line": {"a1": _num(rep.line.a1), "a2": _num(rep.line.a2)},
        "sar": _num(rep.sar),
        "iterations": [
            {
                "index": r.index,
                "rule": r.rule_used.value,
                "entering_label": r.entering_label,
                "interp_t": [_num(t) for t in r.interpolation_points],
                "sar": _num(r.sar),
            }
            for r in rep.iterations
        ],
        "uniqueness": {
            "kind": rep.uniqueness.kind,
            "alternates": [{"a1": _num(a.a1), "a2": _num(a.a2)} for a in rep.uniqueness.alternates],
        },
        "residuals": [_num(r) for r in np.asarray(rep.residuals)],
        "sign_counts": dict(rep.sign_counts._asdict()),
        "warnings": list(rep.warnings),
    }


def _g(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".") if abs(x) < 1e15 else f"{x:g}"


def _summary(rep: FitReport) -> str:
    return f"a1={_g(rep.line.a1)} a2={_g(rep.line.a2)} SAR={_g(rep.sar)} iters={rep.n_iterations} {rep.uniqueness.kind}"


def _print_trajectory(rep: FitReport, out) -> None:
    print(f"{'iter':>4}  {'rule':<4} {'SAR':>14}  interpolation t", file=out)
    print(f"{0:>4}  {'':<4} {rep.initial_sar:>14.6f}", file=out)
    for r in rep.iterations:
        pts = ", ".join(_g(t) for t in r.interpolation_points)
        print(f"{r.index:>4}  {r.rule_used.value:<4} {r.sar:>14.6f}  {pts}", file=out)


def cmd_fit(args, out) -> int:
    ds = load_input(args.input, args.weights)
    opts = _options(args)
    try:
        rep = fit(ds, opts)
    except CyclingDetected as exc:
        if args.json:
            payload = report_to_dict(exc.report, args.input, opts) if exc.report else {"input": args.input}
            payload["cycling"] = str(exc)
            json.dump(payload, out, indent=2)
            out.write("\n")
        elif exc.report is not None:
            _print_trajectory(exc.report, out)
            print(f"Cycles! {exc}", file=out)
        print(f"cycling detected: {exc}", file=sys.stderr)
        return EXIT_CYCLING
    if args.json:
        json.dump(report_to_dict(rep, args.input, opts), out, indent=2)
        out.write("\n")
        return EXIT_OK
    print(_summary(rep), file=out)
    if rep.delta_line is not None:
        print(f"start line a1={_g(rep.base_line.a1)} a2={_g(rep.base_line.a2)}; "
              f"L1 correction a1={_g(rep.delta_line.a1)} a2={_g(rep.delta_line.a2)}", file=out)
    interp = sorted(float(ds.t[i]) for i in rep.interpolated)
    print("interpolated t: " + ", ".join(_g(t) for t in interp), file=out)
    for alt in rep.uniqueness.alternates:
        print(f"alternate: a1={_g(alt.a1)} a2={_g(alt.a2)}", file=out)
    if args.verbose:
        _print_trajectory(rep, out)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def sweep(strategy: Strategy = Strategy.HYBRID) -> list[dict]:
    rows = []
    for ds in all_cpi_windows():
        rep = fit(ds, strategy=strategy)
        length, start = ds.m, int(ds.t[0])
        rows.append({"window": ds.name, "length": length, "start": start, "sar": rep.sar,
                     "verdict": rep.uniqueness.letter})
    return rows


def equal_sar_pairs(rows: list[dict], tol: float = 1e-9) -> list[tuple[str, str]]:
    """Windows whose SAR* does not change when the next point is added."""
    by_key = {(r["length"], r["start"]): r for r in rows}
    pairs = []
    for (length, start), r in sorted(by_key.items()):
        nxt = by_key.get((length + 1, start))
        if nxt is not None and abs(nxt["sar"] - r["sar"]) <= tol * max(1.0, r["sar"]):
            pairs.append((r["window"], nxt["window"]))
    return pairs


def _triangle(rows: list[dict], cell) -> list[str]:
    grid = {(r["length"], r["start"]): r for r in rows}
    lengths = sorted({r["length"] for r in rows})
    starts = sorted({r["start"] for r in rows})
    lines = ["L\\S " + "".join(f"{s:>6d}" for s in starts)]
    for length in lengths:
        cells = [cell(grid[(length, s)]) if (length, s) in grid else "" for s in starts]
        lines.append(f"{length:>3} " + "".join(f"{c:>6}" for c in cells))
    return lines


def cmd_sweep_cpi(args, out) -> int:
    rows = sweep(Strategy(args.strategy))
    pairs = equal_sar_pairs(rows)
    if args.json:
        json.dump({"strategy": args.strategy, "windows": rows, "equal_sar_pairs": pairs}, out, indent=2)
        out.write("\n")
        return EXIT_OK
    print("Uniqueness (U) or non-uniqueness (N)", file=out)
    print("\n".join(_triangle(rows, lambda r: r["verdict"])), file=out)
    print("\nSAR* (2 decimals)", file=out)
    print("\n".join(_triangle(rows, lambda r: f"{r['sar']:.2f}")), file=out)
    print(f"\n{len(pairs)} windows keep SAR* when the next point is added:", file=out)
    print("  " + ", ".join(f"{a}={b}" for a, b in pairs), file=out)
    return EXIT_OK


def _compare_spec(token: str) -> tuple[str, StrategyOptions]:
    token = token.strip()
    if token == "l2-start":
        return token, StrategyOptions(start=StartMode.l2())
    name, _, start = token.partition("+")
    try:
        strategy = Strategy(name)
    except ValueError:
        raise UsageError(f"unknown strategy {name!r}") from None
    return token, StrategyOptions(strategy=strategy, start=_parse_start(start or "cold"))


def cmd_compare(args, out) -> int:
    ds = load_input(args.input, args.weights)
    specs = [_compare_spec(s) for s in args.strategies.split(",") if s.strip()]
    if not specs:
        raise UsageError("need at least one strategy")
    columns = []
    for name, opts in specs:
        opts = replace(opts, column_policy=ColumnPolicy(args.column), tol=args.toler)
        try:
            rep, cycled = fit(ds, opts), False
        except CyclingDetected as exc:
            rep, cycled = exc.report, True
        columns.append((name, rep, cycled))
    width = 30
    print("".join(f"{name:<{width}}" for name, _, _ in columns), file=out)
    print("".join(f"{'Interp pts':<18}{'SAR':<{width - 18}}" for _ in columns), file=out)
    depth = max(len(rep.iterations) for _, rep, _ in columns) + 1
    for i in range(depth):
        cells = []
        for _, rep, cycled in columns:
            if i < len(rep.iterations):
                r = rep.iterations[i]
                pts = ",".join(_g(t) for t in r.interpolation_points)
                cells.append(f"{pts:<18}{r.sar:<{width - 18}.6g}")
            elif i == len(rep.iterations) and cycled:
                cells.append(f"{'Cycles!':<{width}}")
            else:
                cells.append(" " * width)
        print("".join(cells).rstrip(), file=out)
    print("".join(f"{'iters=' + str(rep.n_iterations) + (' (cycling)' if c else ''):<{width}}"
                  for _, rep, c in columns), file=out)
    print("".join(f"{'line=(' + _g(rep.line.a1) + ', ' + _g(rep.line.a2) + ')':<{width}}"
                  for _, rep, _ in columns).rstrip(), file=out)
    return EXIT_CYCLING if any(c for _, _, c in columns) else EXIT_OK


def cmd_oracle(args, out) -> int:
    ds = load_input(args.input, args.weights)
    if ds.m > args.cap:
        raise UsageError(f"{ds.m} points exceeds the oracle cap of {args.cap} (use --cap)")
    res = brute_force_best(ds)
    print(f"sar_star={_g(res.sar_star)}", file=out)
    print(f"optimal lines: {res.n_lines}", file=out)
    for line in res.lines:
        print(f"  a1={_g(line.a1)} a2={_g(line.a2)}", file=out)
    pairs = sorted(res.optimal_pairs)
    print("optimal pairs (t_i, t_j): " + ", ".join(f"({_g(ds.t[i])}, {_g(ds.t[j])})" for i, j in pairs), file=out)
    rep = fit(ds)
    agree = abs(rep.sar - res.sar_star) <= 1e-9 * max(1.0, res.sar_star)
    print(f"hybrid SAR={_g(rep.sar)}: {'agrees' if agree else 'DISAGREES'}", file=out)
    return EXIT_OK if agree else EXIT_NUMERIC


def cmd_trace(args, out) -> int:
    ds = load_input(args.input, args.weights)
    if ds.m > TRACE_LIMIT and not args.force:
        raise UsageError(f"{ds.m} points is too many to dump (limit {TRACE_LIMIT}); pass --force")
    opts = _options(args)
    if opts.scaling:
        print("note: tableaux below are for the unscaled problem", file=sys.stderr)
        opts = replace(opts, scaling=False)
    if opts.strategy is Strategy.RESTARTED_WM:
        print("note: rebuilt tableaux at each restart are shown as initial tableaux", file=sys.stderr)

    def show(rec, tab):
        if rec is None:
            print("initial tableau", file=out)
        else:
            print(f"\niteration {rec.index} ({rec.rule_used.value}): label {rec.entering_label} enters, "
                  f"label {rec.leaving_label} leaves, pivot {rec.pivot_value:.6g}", file=out)
        print(tab.format(), file=out)

    start_line = {"cold": LineParams(0.0, 0.0), "trial": opts.start.line}.get(opts.start.kind)
    if start_line is None:
        from .lsq import l2_fit
        start_line, _ = l2_fit(ds)
    show(None, CondensedTableau.initialize(ds.with_d(ds.d - start_line(ds.t)), opts.tol))
    try:
        rep = fit(ds, replace(opts, on_iteration=show))
    except CyclingDetected as exc:
        print(f"\nCycles! {exc}", file=out)
        return EXIT_CYCLING
    print("\n" + _summary(rep), file=out)
    return EXIT_OK


def _common(p: argparse.ArgumentParser, full: bool = True) -> None:
    p.add_argument("input", help="fixture:NAME, cpi:LxSy or a CSV path")
    p.add_argument("--weights", choices=["embedded", "uniform"], default="embedded")
    p.add_argument("--column", choices=[c.value for c in ColumnPolicy], default="max-mc")
    p.add_argument("--toler", type=float, default=StrategyOptions().tol)
    if full:
        p.add_argument("--strategy", choices=[s.value for s in Strategy], default="hybrid")
        p.add_argument("--start", nargs="+", default=["cold"], metavar="MODE",
                       help="cold, l2, or trial A1,A2")
        p.add_argument("--scale", action="store_true", help="rescale t and d to [-1, 1] before fitting")
        p.add_argument("--no-flip", action="store_true", help="disable the degenerate row flip")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1line", description="Weighted L1 straight-line fitting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one data set")
    _common(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true", help="also print the SAR trajectory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep-cpi", help="fit all 171 CPI windows")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="hybrid")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep_cpi)

    p = sub.add_parser("compare", help="side-by-side iteration traces")
    _common(p, full=False)
    p.add_argument("--strategies", default="br,wm,hybrid",
                   help="comma list; STRATEGY[+l2|+trial:A1,A2] or l2-start")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="brute-force check over all point pairs")
    p.add_argument("input")
    p.add_argument("--weights", choices=["embedded", "uniform"], default="embedded")
    p.add_argument("--cap", type=int, default=ORACLE_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("trace", help="print every condensed tableau")
    _common(p)
    p.add_argument("--force", action="store_true", help=f"allow more than {TRACE_LIMIT} points")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except CyclingDetected as exc:
        print(f"cycling detected: {exc}", file=sys.stderr)
        return EXIT_CYCLING
    except (InputError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except L1LineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
