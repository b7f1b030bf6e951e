"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 numerical failure (including a failed
demo check), 4 invalid graph.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, checks, constants, exact, foster
from .exact import DisconnectedGraphError, OracleError
from .graph import Graph, GraphError, format_edge_list, load_edge_list
from .lattice import Ball, Family, LatticeError, PairClass, Torus, boundary_fraction, build
from .randwalk import StepCapError, WalkSimConfig, commute_check, simulate_hit
from .solver import ConvergenceError, ExtrapolationError, SolveConfig, cg_resistance, infinite_pair_resistance

SCHEMA = "fosterlab/output-v1"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_GRAPH = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _sizes(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if len(out) < 3:
        raise argparse.ArgumentTypeError("need at least three sizes")
    return out


def _family(text: str) -> Family:
    try:
        return Family.parse(text)
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise argparse.ArgumentTypeError(f"unknown family {text!r} (choose from {choices})") from None


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (dict, list)):
        return json.dumps(x, sort_keys=True)
    return "" if x is None else str(x)


def to_csv(rows: list[dict]) -> str:
    """CSV projection of flat records; floats keep 17 significant digits."""
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _record(args, config: dict, results, provenance=None, t0: float = 0.0) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "argv": list(args.argv),
        "config": config,
        "results": results,
        "provenance": provenance or [],
        "wall_time_s": time.perf_counter() - t0,
    }


def _emit(args, record: dict, rows: list[dict], text: str) -> None:
    if args.json:
        print(json.dumps(record, indent=2, sort_keys=True))
    elif args.csv:
        sys.stdout.write(to_csv(rows))
    else:
        print(text)


def _load_graph(args) -> Graph:
    g = load_edge_list(args.file)
    if not getattr(args, "weighted", True) and not g.is_unit():
        raise GraphError("graph has non-unit conductances; pass --weighted to use them")
    return g


def _solve_cfg(args) -> SolveConfig:
    return SolveConfig(tol=args.tol, max_iter=args.max_iter)


# -- commands ----------------------------------------------------------------


def cmd_lattice(args) -> int:
    t0 = time.perf_counter()
    if (args.ball is None) == (args.torus is None):
        raise UsageError("give exactly one of --ball or --torus")
    mode = Ball(args.ball) if args.ball is not None else Torus(args.torus)
    lg = build(args.family, mode, subdivided=args.subdivided)
    g = lg.graph
    frac = boundary_fraction(lg) if isinstance(mode, Ball) else 0.0
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
    summary = {
        "family": lg.family.value,
        "mode": "ball" if isinstance(mode, Ball) else "torus",
        "size": args.ball if args.ball is not None else args.torus,
        "subdivided": args.subdivided,
        "n": g.n,
        "m": g.m,
        "boundary_fraction": frac,
        "out": args.out,
    }
    record = _record(args, {"family": lg.family.value, "ball": args.ball, "torus": args.torus,
                            "subdivided": args.subdivided}, summary, t0=t0)
    human = f"n={g.n} m={g.m} boundary_fraction={frac:.6g}"
    if not args.out and not (args.json or args.csv):
        sys.stdout.write(text)
        print(human, file=sys.stderr)
        return EXIT_OK
    _emit(args, record, [summary], human)
    return EXIT_OK


def cmd_resist(args) -> int:
    t0 = time.perf_counter()
    cfg = _solve_cfg(args)
    provenance = []
    if args.file:
        if args.i is None or args.j is None:
            raise UsageError("--file needs --i and --j")
        g = _load_graph(args)
        if args.exact:
            value = exact.exact_resistance(g, args.i, args.j)
            result = {"pair": [args.i, args.j], "value": _fmt(value), "value_float": float(value), "method": "exact"}
        else:
            rep = cg_resistance(g.to_float(), args.i, args.j, cfg)
            result = rep.to_dict()
            result["method"] = "cg"
        config = {"file": args.file, "i": args.i, "j": args.j, "exact": args.exact, "tol": args.tol}
    else:
        if not args.family or not args.pair:
            raise UsageError("give --file with --i/--j, or --family with --pair")
        pc = PairClass.of(args.family, args.pair, args.subdivided)
        rep = infinite_pair_resistance(pc.family, pc, cfg, args.sizes, args.boundary, args.subdivided, args.model)
        result = rep.to_dict()
        if rep.closed_form is not None:
            provenance.append(rep.closed_form.to_dict())
        config = {"family": pc.family.value, "pair": pc.descriptor, "subdivided": args.subdivided,
                  "sizes": list(args.sizes), "boundary": args.boundary, "model": args.model, "tol": args.tol}
    record = _record(args, config, result, provenance, t0)
    flat = {k: v for k, v in result.items() if not isinstance(v, (dict, list)) or k == "pair"}
    text = f"R = {result['value']}  ({result['method']})"
    cf = result.get("closed_form")
    if cf:
        text += f"\nclosed form {cf['expression']} = {cf['value']:.12g}"
    _emit(args, record, [flat], text)
    return EXIT_OK


def cmd_sumrule(args) -> int:
    t0 = time.perf_counter()
    if args.file:
        g = _load_graph(args)
        mode = "float" if args.float else "exact"
        if args.identity == "hitting":
            rep = foster.finite_hitting_trace_check(g, args.r, Path(args.file).name)
        else:
            rep = foster.finite_foster_check(g, args.r, mode, Path(args.file).name)
        config = {"file": args.file, "r": args.r, "mode": mode, "identity": args.identity, "weighted": args.weighted}
        ok = rep.holds(args.rel_tol)
    elif args.family:
        rep = foster.infinite_sum_rule_lhs(args.family, args.r, _solve_cfg(args), nondegenerate=args.nondegenerate,
                                           midpoint=args.midpoint, sizes=args.sizes, boundary=args.boundary)
        config = {"family": Family.parse(args.family).value, "r": args.r, "nondegenerate": args.nondegenerate,
                  "midpoint": args.midpoint, "sizes": list(args.sizes), "boundary": args.boundary}
        ok = rep.holds(args.rel_tol)
    else:
        raise UsageError("give --file or --family")
    result = rep.to_dict()
    result["passed"] = ok
    record = _record(args, config, result, t0=t0)
    text = f"r={rep.r} lhs={_fmt(rep.lhs)} rhs={_fmt(rep.rhs)} residual={_fmt(rep.residual)} ({'ok' if ok else 'MISS'})"
    flat = {k: v for k, v in result.items() if not isinstance(v, (dict, list))}
    _emit(args, record, [flat], text)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_hittime(args) -> int:
    t0 = time.perf_counter()
    g = _load_graph(args)
    cfg = WalkSimConfig(seed=args.seed, replications=args.replications, step_cap=args.step_cap)
    est = simulate_hit(g, args.i, args.j, cfg)
    result = est.to_dict()
    if g.exact and g.n <= exact.DEFAULT_CAP:
        H = exact.exact_hitting_times(g)
        ex = H[args.i][args.j]
        result["exact"] = _fmt(ex)
        result["exact_float"] = float(ex)
        diff = est.mean - float(ex)
        result["z"] = 0.0 if diff == 0 else (abs(diff) / est.stderr if est.stderr else float("inf"))
    if args.commute:
        result["commute"] = commute_check(g, args.i, args.j, cfg).to_dict()
    config = {"file": args.file, "i": args.i, "j": args.j, "seed": args.seed,
              "replications": args.replications, "step_cap": args.step_cap}
    record = _record(args, config, result, t0=t0)
    text = f"E_{args.i}T_{args.j} ~ {est.mean:.6g} +- {est.stderr:.3g}"
    if "exact" in result:
        text += f"  (exact {result['exact']}, z={result['z']:.2f})"
    flat = {k: v for k, v in result.items() if not isinstance(v, dict)}
    _emit(args, record, [flat], text)
    return EXIT_OK


def cmd_demo(args) -> int:
    t0 = time.perf_counter()
    show = None if (args.json or args.csv) else (lambda c: print(c.line(), flush=True))
    results = checks.run_all(quick=args.quick, progress=show)
    passed = all(c.passed for c in results)
    record = _record(args, {"quick": args.quick}, [c.to_dict() for c in results],
                     checks.closed_form_provenance(), t0)
    record["passed"] = passed
    if args.json or args.csv:
        rows = [{k: v for k, v in c.to_dict().items() if k != "detail"} for c in results]
        _emit(args, record, rows, "")
    else:
        print(f"{sum(c.passed for c in results)}/{len(results)} checks passed "
              f"in {time.perf_counter() - t0:.1f}s")
    return EXIT_OK if passed else EXIT_NUMERIC


# -- parser ------------------------------------------------------------------


def _output_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="emit a JSON record")
    g.add_argument("--csv", action="store_true", help="emit a CSV projection")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-10, help="CG relative residual (default 1e-10)")
    p.add_argument("--max-iter", type=int, default=None, help="CG iteration cap (default 20*sqrt(n))")
    p.add_argument("--sizes", type=_sizes, default=(16, 32, 64), help="lattice sizes for extrapolation")
    p.add_argument("--boundary", choices=["torus", "ball"], default="torus")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fosterlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="generate a lattice as an edge list")
    p.add_argument("--family", required=True, type=_family)
    p.add_argument("--ball", type=int)
    p.add_argument("--torus", type=int)
    p.add_argument("--subdivided", action="store_true")
    p.add_argument("--out", help="edge-list path (default: stdout)")
    _output_flags(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("resist", help="effective resistance on a file graph or an infinite lattice")
    p.add_argument("--file")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--exact", action="store_true", help="exact rational oracle (file graphs)")
    p.add_argument("--weighted", action="store_true", help="use non-unit conductances from the file")
    p.add_argument("--family", type=_family)
    p.add_argument("--pair", help="pair class, e.g. 2,1 / d2 / straight2 / octagon-octagon")
    p.add_argument("--subdivided", action="store_true")
    p.add_argument("--model", choices=["inv-poly", "richardson"], default="inv-poly")
    _solver_flags(p)
    _output_flags(p)
    p.set_defaults(func=cmd_resist)

    p = sub.add_parser("sumrule", help="check a Foster sum rule")
    p.add_argument("--file")
    p.add_argument("--family", type=_family)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="exact arithmetic (default for files)")
    p.add_argument("--float", action="store_true", help="floating-point CG for file graphs")
    p.add_argument("--weighted", action="store_true", help="use non-unit conductances from the file")
    p.add_argument("--identity", choices=["foster", "hitting"], default="foster")
    p.add_argument("--nondegenerate", action="store_true")
    p.add_argument("--midpoint", action="store_true")
    p.add_argument("--rel-tol", type=float, default=0.01, help="relative tolerance for float checks (default 1%%)")
    _solver_flags(p)
    _output_flags(p)
    p.set_defaults(func=cmd_sumrule)

    p = sub.add_parser("hittime", help="Monte Carlo hitting time with exact comparison")
    p.add_argument("--file", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=100_000)
    p.add_argument("--step-cap", type=int, default=10_000_000)
    p.add_argument("--weighted", action="store_true", help="use non-unit conductances from the file")
    p.add_argument("--commute", action="store_true", help="also check the commute-time identity")
    _output_flags(p)
    p.set_defaults(func=cmd_hittime)

    p = sub.add_parser("demo", help="run every reproduction check")
    p.add_argument("--quick", action="store_true", help="smaller tori, looser tolerances")
    _output_flags(p)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except (UsageError, LatticeError) as exc:
        print(f"fosterlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ExtrapolationError, StepCapError) as exc:
        print(f"fosterlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphError, DisconnectedGraphError, OracleError, OSError) as exc:
        print(f"fosterlab: invalid graph: {exc}", file=sys.stderr)
        return EXIT_GRAPH


if __name__ == "__main__":
    sys.exit(main())
