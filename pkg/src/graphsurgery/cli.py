"""Command line driver: spectra, surgery scripts, bounds, verification suites and sweeps.

Exit status is 0 on success, 1 when a verification suite records a Fail and 2
for usage, parse and validation errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import errors
from .bounds import interpolation_check, lower_bounds
from .graph import MetricGraph
from .io import dump_graph, eigenfunction_csv, fmt, load_graph, rounded, spectrum_to_dict, surgery_result_to_dict
from .spectrum import SolverConfig, solve_spectrum, spectral_gap
from .surgery import apply_script
from .topology import _split_params, build_named
from .verify import SUITES, run_all, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_graph_source(s: str) -> MetricGraph:
    """Load a graph from a JSON file path or build it from a spec string."""
    p = Path(s)
    if p.suffix.lower() == ".json" or p.is_file():
        if not p.is_file():
            raise errors.ParseError(f"no such graph file: {s}")
        return load_graph(p)
    return build_named(s)


def _jsonable(x: Any) -> Any:
    """Plain JSON values with floats rounded to 12 significant digits."""
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return rounded(x) if math.isfinite(x) else None
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    if isinstance(x, MetricGraph):
        return json.loads(dump_graph(x))
    return str(x)


def _dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(
            mesh_points_per_unit_length=args.mesh,
            num_eigenvalues=getattr(args, "n", None) or 10,
            refine=not args.no_refine,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# commands


def _cmd_spectrum(args, out) -> int:
    g = parse_graph_source(args.graph)
    cfg = _config(args)
    spec = solve_spectrum(g, cfg)
    n = min(args.n, len(spec.pairs))
    if args.eigenfunction is not None:
        k = args.eigenfunction
        if not 1 <= k <= len(spec.pairs):
            raise UsageError(f"--eigenfunction must lie in 1..{len(spec.pairs)}")
        _write(args.csv, eigenfunction_csv(spec.pair(k), args.points), out)
        if args.csv in (None, "-"):
            return EXIT_OK
    if args.json:
        d = spectrum_to_dict(spec)
        d["values"] = spec.values[:n]
        d["truncated"] = spec.truncated
        d["warnings"] = list(spec.warnings)
        out.write(_dumps(d))
    else:
        errs = spec.abs_errors()
        out.write("k,lambda,abs_err\n")
        for k in range(n):
            out.write(f"{k + 1},{fmt(spec.values[k])},{fmt(errs[k])}\n")
    for w in spec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_surgery(args, out) -> int:
    g = parse_graph_source(args.graph)
    try:
        ops = json.loads(Path(args.script).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise errors.ParseError(f"no such script file: {args.script}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"{args.script}: invalid JSON ({exc})") from exc
    if isinstance(ops, dict):
        ops = [ops]
    if not isinstance(ops, list) or not all(isinstance(o, dict) for o in ops):
        raise errors.ParseError("surgery script must be a JSON list of operation objects")
    cfg = _config(args)
    res = apply_script(g, ops, cfg)
    d = surgery_result_to_dict(res)
    if args.spectrum:
        d["spectrum_before"] = spectrum_to_dict(solve_spectrum(g, cfg))
        d["spectrum_after"] = spectrum_to_dict(solve_spectrum(res.graph, cfg))
    _write(args.out, _dumps(d), out)
    return EXIT_OK


def _cmd_bounds(args, out) -> int:
    g = parse_graph_source(args.graph)
    cfg = _config(args)
    rep = lower_bounds(g, cfg)
    d = rep.to_dict()
    d["worst_margin"] = rep.worst_margin
    _write(args.out, _dumps(d), out)
    if args.csv:
        if args.grid_points < 2:
            raise UsageError("--grid-points must be at least 2")
        grid = np.linspace(0.0, rep.L, args.grid_points)
        Path(args.csv).write_text(interpolation_check(rep.L, grid, cfg).to_csv(), encoding="utf-8")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    cfg = _config(args)
    reps = run_all(args.seeds, args.base_seed, cfg) if args.suite == "all" else [
        run_suite(args.suite, args.seeds, args.base_seed, cfg)
    ]
    for r in reps:
        c = r.counts
        out.write(
            f"{r.suite}: {'OK' if r.ok else 'FAIL'} instances={r.instances} "
            f"pass={c['Pass']} near_equality={c['NearEquality']} "
            f"hypothesis_not_met={c['HypothesisNotMet']} fail={c['Fail']} "
            f"hypothesis_rate={fmt(r.hypothesis_rate)} min_slack={fmt(r.min_slack)}\n"
        )
        if not r.meaningful:
            print(f"warning: {r.suite} hypothesis rate {fmt(r.hypothesis_rate)} is below 0.8", file=sys.stderr)
        if r.failure:
            print(f"{r.suite}: first failure at index {r.failure.get('index')}", file=sys.stderr)
    if args.report:
        Path(args.report).write_text(_dumps({"suites": [r.to_dict() for r in reps]}), encoding="utf-8")
    return EXIT_OK if all(r.ok for r in reps) else EXIT_FAIL


def parse_range(text: str) -> tuple[str, list[float]]:
    """``name=start:stop:step`` (stop included) or ``name=a,b,c``."""
    if "=" not in text:
        raise UsageError(f"expected name=start:stop:step, got {text!r}")
    name, raw = (s.strip() for s in text.split("=", 1))
    try:
        if ":" in raw:
            a, b, h = (float(x) for x in raw.split(":"))
            if h <= 0 or b < a:
                raise UsageError(f"bad range {raw!r}")
            n = int(math.floor((b - a) / h + 1e-9))
            vals = [float(f"{a + i * h:.12g}") for i in range(n + 1)]
        else:
            vals = [float(x) for x in raw.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad range {raw!r}") from exc
    return name, vals


_NO_L = ("star", "flower", "pumpkin", "chain")


def _cmd_sweep(args, out) -> int:
    fam, _, fixed = args.family.partition(":")
    name, vals = parse_range(args.range)
    params = _split_params(fixed)
    if name in params:
        raise UsageError(f"{name} is both fixed and swept")
    if "L" not in params and name != "L" and fam.lower() not in _NO_L:
        params["L"] = "1"
    cfg = _config(args)
    lines = [f"{name},{f'lambda{args.k}' if args.k else 'mu'}"]
    for v in vals:
        spec = ",".join(f"{k}={x}" for k, x in {**params, name: repr(v)}.items())
        g = build_named(f"{fam}:{spec}")
        if args.k:
            y = solve_spectrum(g, cfg.with_(num_eigenvalues=args.k)).lam(args.k)
        else:
            y = spectral_gap(g, cfg)
        lines.append(f"{fmt(v)},{fmt(y)}")
    _write(args.out, "\n".join(lines) + "\n", out)
    return EXIT_OK


# argument parsing


def _solver_flags(p: argparse.ArgumentParser, n_default: int = 10) -> None:
    p.add_argument("-n", type=int, default=n_default, help="number of eigenvalues (with multiplicity)")
    p.add_argument("--mesh", type=int, default=32, help="FEM points per unit length")
    p.add_argument("--no-refine", action="store_true", help="FEM estimates only, no secular refinement")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphsurgery", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of a graph")
    p.add_argument("graph", help="graph JSON file or builder spec such as tadpole:L=1,V=0.5")
    _solver_flags(p)
    p.add_argument("--json", action="store_true", help="JSON instead of CSV")
    p.add_argument("--eigenfunction", type=int, metavar="K", help="sample the K-th eigenfunction")
    p.add_argument("--csv", metavar="PATH", help="where to write the eigenfunction samples")
    p.add_argument("--points", type=int, default=101, help="samples per edge")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("surgery", help="apply a surgery script")
    p.add_argument("graph")
    p.add_argument("script", help="JSON list of surgery operations")
    _solver_flags(p)
    p.add_argument("--spectrum", action="store_true", help="include spectra before and after")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_surgery)

    p = sub.add_parser("bounds", help="spectral gap lower bounds of an all-natural graph")
    p.add_argument("graph")
    _solver_flags(p)
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--csv", metavar="PATH", help="dumbbell/tadpole interpolation table")
    p.add_argument("--grid-points", type=int, default=21)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify", help="seeded verification suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--base-seed", type=int, required=True)
    p.add_argument("--report", metavar="PATH", help="full JSON report")
    _solver_flags(p)
    p.add_argument("--json", action="store_true", help="accepted for symmetry; see --report")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="CSV of the gap over a parameter grid")
    p.add_argument("family", help="builder family with optional fixed parameters, e.g. stick:m=2,l2=0")
    p.add_argument("range", help="swept parameter, name=start:stop:step or name=a,b,c")
    p.add_argument("-k", type=int, default=0, help="report lambda_k instead of the gap")
    p.add_argument("--out", metavar="PATH")
    _solver_flags(p)
    p.set_defaults(func=_cmd_sweep)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, errors.GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
