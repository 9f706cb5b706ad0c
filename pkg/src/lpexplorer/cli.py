"""Command-line entry point.

Subcommands: analytic, sample, field, sweep, validate.  Exit codes:
0 success, 1 runtime/numeric failure, 2 usage error.  All outputs go to
--out-dir (default: $LPEXPLORER_OUT or the current directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .analytic import lawler_lpp, schramm_lpp_angle
from .errors import DomainError, NumericError, SolverError
from .experiment import (
    build_manifest,
    convergence_sweep,
    estimate_lpp_field,
    estimates_to_csv,
    sweep_to_csv,
)
from .explorer import ExplorerConfig, run_explorer
from .lattice import DomainConfig, domain_to_json, path_to_text
from .params import KappaParams, WalkParams
from .validation import run_validation_suite


def _kappa_type(text: str) -> float:
    try:
        # accept simple fractions like 8/3
        value = eval(text, {"__builtins__": {}}) if "/" in text else float(text)
        value = float(value)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"invalid kappa {text!r}") from exc
    if not 0.0 < value < 8.0:
        raise argparse.ArgumentTypeError(f"kappa must lie in (0, 8), got {value}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _point_type(text: str) -> tuple[float, float]:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"point must be 'x,y', got {text!r}") from exc
    return x, y


def _size_type(text: str) -> tuple[int, int]:
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"size must be 'WIDTHxHEIGHT', got {text!r}") from exc
    if w < 4 or w % 2 or h < 4:
        raise argparse.ArgumentTypeError(f"size {text!r}: width even >= 4, height >= 4")
    return w, h


def _grid_type(text: str) -> list[float]:
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be 'start:stop:step', got {text!r}") from exc
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("grid needs stop >= start and step > 0")
    grid = []
    t = start
    while t <= stop + 1e-12:
        grid.append(t)
        t += step
    return grid


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--kappa", type=_kappa_type, default=4.0, help="kappa in (0, 8); default 4")
    p.add_argument(
        "--beta-convention",
        choices=("matched", "paper"),
        default="matched",
        help="drift-sign convention for beta (default: matched, the PDE-consistent one)",
    )
    p.add_argument(
        "--nu-override",
        type=float,
        default=None,
        help="force the Bessel order instead of deriving it from kappa",
    )
    p.add_argument(
        "--scheme",
        choices=("csaki", "asymptotic"),
        default="csaki",
        help="height-walk bias scheme (default csaki)",
    )


def _add_run_flags(p: argparse.ArgumentParser):
    _add_model_flags(p)
    p.add_argument("--width", type=int, default=20, help="columns, even >= 4 (default 20)")
    p.add_argument("--height", type=int, default=10, help="rows, >= 4 (default 10)")
    p.add_argument("--spacing", type=_positive, default=1.0, help="lattice spacing delta > 0 (default 1)")
    p.add_argument("--variation", choices=("v1", "v2"), default="v1", help="turn rule (default v1)")
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed (default 0)")
    p.add_argument(
        "--max-steps",
        type=int,
        default=None,
        help="step cap per path (default 10 * width * height)",
    )
    p.add_argument("--svg", action="store_true", help="also emit SVG renderings")


def _explorer_config(args) -> ExplorerConfig:
    kp = KappaParams(args.kappa, convention=args.beta_convention)
    if args.nu_override is not None:
        walk = WalkParams(nu=args.nu_override, scheme=args.scheme)
    else:
        walk = WalkParams(nu=kp.nu, scheme=args.scheme)
    return ExplorerConfig(
        domain=DomainConfig(args.width, args.height, spacing=args.spacing),
        kappa=kp,
        walk=walk,
        variation=args.variation,
        max_steps=args.max_steps,
        seed=args.seed,
    )


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _write(path: str, content: str):
    with open(path, "w") as fh:
        fh.write(content)


def cmd_analytic(args) -> int:
    rows = ["theta,schramm,lawler,difference"]
    kp = KappaParams(args.kappa, convention=args.beta_convention)
    for th in args.grid:
        if not 0.0 < th < math.pi:
            continue
        s = schramm_lpp_angle(kp, th)
        l = lawler_lpp(kp, th)
        rows.append(f"{th:.10g},{s:.12g},{l:.12g},{s - l:.3e}")
    if args.format == "json":
        header, *body = [r.split(",") for r in rows]
        payload = [dict(zip(header, row)) for row in body]
        _write(_out_path(args, "analytic.json"), json.dumps(payload, indent=2) + "\n")
    else:
        _write(_out_path(args, "analytic.csv"), "\n".join(rows) + "\n")
    return 0


def cmd_sample(args) -> int:
    config = _explorer_config(args)
    path, state = run_explorer(config)
    manifest = build_manifest(config, config.seed, 1)
    manifest["terminated"] = path.terminated
    manifest["n_steps"] = len(path)
    manifest["counters"] = state.counters
    _write(_out_path(args, "path.txt"), path_to_text(state))
    _write(_out_path(args, "domain.json"), domain_to_json(state))
    _write(_out_path(args, "manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if args.svg:
        from .render import path_svg

        path_svg(state, _out_path(args, "path.svg"))
    if path.terminated != "reached_v_end":
        print(f"run terminated: {path.terminated}", file=sys.stderr)
        return 1
    return 0


def cmd_field(args) -> int:
    config = _explorer_config(args)
    result = estimate_lpp_field(config, args.point, args.n_paths, threads=args.threads)
    _write(_out_path(args, "results.csv"), estimates_to_csv(result))
    report = {
        "estimates": [
            {
                "x": e.point[0],
                "y": e.point[1],
                "empirical": e.empirical,
                "se": e.se,
                "analytic": e.analytic,
                "difference": e.difference,
            }
            for e in result.estimates
        ],
        "n_failed": result.n_failed,
        "counters": result.counters,
        "provenance": result.manifest["provenance"],
    }
    _write(_out_path(args, "report.json"), json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write(
        _out_path(args, "manifest.json"),
        json.dumps(result.manifest, indent=2, sort_keys=True) + "\n",
    )
    if args.svg:
        from .hitting import solve_field
        from .lattice import build_domain
        from .render import field_svg

        state = build_domain(config.domain)
        field_svg(solve_field(state, config.walk), state, _out_path(args, "field.svg"))
    return 0


def cmd_sweep(args) -> int:
    rows = convergence_sweep(
        args.kappas,
        args.sizes,
        args.n_paths,
        point=args.point[0],
        variation=args.variation,
        master_seed=args.seed,
        threads=args.threads,
    )
    _write(_out_path(args, "sweep.csv"), sweep_to_csv(rows))
    return 0


def cmd_validate(args) -> int:
    report = run_validation_suite(args.level)
    _write(_out_path(args, "validation.json"), json.dumps(report, indent=2) + "\n")
    for it in report["items"]:
        print(f"{'PASS' if it['passed'] else 'FAIL'}  {it['name']}: {it['detail']}")
    print(f"findings: {json.dumps(report['findings'])}")
    return 0 if report["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpexplorer",
        description="Exploration paths driven by random-walk/Bessel-walk hitting "
        "probabilities, with SLE left-passage analytics",
    )
    parser.add_argument(
        "--out-dir",
        default=os.environ.get("LPEXPLORER_OUT", "."),
        help="output directory (default: $LPEXPLORER_OUT or '.')",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
    parser.add_argument(
        "--threads", type=int, default=1, help="max parallel replicas (default 1)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="tabulate the two left-passage formulas")
    _add_model_flags(p)
    p.add_argument(
        "--grid",
        type=_grid_type,
        default=_grid_type("0.1:3.04:0.1"),
        help="theta grid 'start:stop:step' inside (0, pi); default 0.1:3.04:0.1",
    )
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("sample", help="grow a single exploration path")
    _add_run_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("field", help="Monte Carlo left-passage field at query points")
    _add_run_flags(p)
    p.add_argument(
        "--point",
        type=_point_type,
        action="append",
        required=True,
        help="physical query point 'x,y'; repeatable; must keep >= 2 lattice "
        "units from the boundary",
    )
    p.add_argument("--n-paths", type=int, default=1000, help="number of paths (default 1000)")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("sweep", help="convergence sweep over lattice sizes")
    _add_run_flags(p)
    p.add_argument(
        "--kappas", type=_kappa_type, nargs="*", default=[4.0], help="list of kappa values"
    )
    p.add_argument(
        "--sizes",
        type=_size_type,
        nargs="+",
        default=[(10, 5), (20, 10), (40, 20)],
        help="increasing lattice sizes WxH (default 10x5 20x10 40x20)",
    )
    p.add_argument("--n-paths", type=int, default=500, help="paths per cell (default 500)")
    p.add_argument(
        "--point",
        type=_point_type,
        action="append",
        default=None,
        help="physical query point of the unit-height scaled domain (default 0.125,0.5)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "point", None) is None and args.command == "sweep":
        args.point = [(0.125, 0.5)]
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, SolverError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
