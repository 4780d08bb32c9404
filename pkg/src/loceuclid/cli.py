"""Command-line front end: ``loceuclid dist | profile | verify``.

Options may also come from a ``key=value`` config file (``--config``);
explicit flags win. ``profile`` and ``verify`` write to ``$LOCEUCLID_OUTPUT_DIR`` when no
``--out`` is given and the variable is set, otherwise to stdout.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import d_E, point3
from .rho_metric import DEFAULT_GRID, rho, rho_at
from .sphere_metric import Param
from .verify import (
    all_passed,
    format_reports,
    reports_to_jsonl,
    run_space_suite,
    run_sphere_suite,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_UNCONVERGED = 3
EXIT_INCONCLUSIVE = 4
EXIT_IO = 5

OUTPUT_DIR_ENV = "LOCEUCLID_OUTPUT_DIR"
VERIFY_T = (0.3, 0.6, 1.0)

CSV_COLUMNS = ("t", "D", "lo", "hi", "lower_envelope", "upper_envelope", "witness_steps")


def fmt(x: float) -> str:
    """12 significant digits, locale independent."""
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def _t_value(text: str) -> float:
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(t) and 0.0 < t <= 1.0):
        raise argparse.ArgumentTypeError(f"t must lie in (0, 1], got {text}")
    return t


def _t_list(text: str) -> list[float]:
    return [_t_value(part) for part in str(text).split(",") if part.strip()]


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _read_config(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


# ---------------------------------------------------------------- commands


def cmd_dist(args) -> int:
    param = Param(args.t)
    p, q = point3(args.p), point3(args.q)
    est = rho(param, p, q, tol=args.tol, grid=args.grid, n_cap=args.ncap)
    witness = ";".join(fmt(c) for c in est.witness.lengths) if est.witness else ""
    if args.format == "records":
        print(
            json.dumps(
                {
                    "t": param.t,
                    "d_E": d_E(p, q),
                    "lo": est.lo,
                    "hi": est.hi,
                    "witness": list(est.witness.lengths) if est.witness else [],
                    "converged": est.converged,
                },
                sort_keys=True,
            )
        )
    else:
        print(
            f"d_E={fmt(d_E(p, q))} lo={fmt(est.lo)} hi={fmt(est.hi)} "
            f"witness={witness or '-'} converged={'yes' if est.converged else 'no'}"
        )
    return EXIT_OK if est.converged else EXIT_UNCONVERGED


def _distances(d_min: float, d_max: float, d_step: float) -> list[float]:
    count = math.floor((d_max - d_min) / d_step + 1e-9) + 1
    return [round(d_min + i * d_step, 12) for i in range(max(count, 0))]


def profile_rows(t_values, distances, tol=1e-9, grid=DEFAULT_GRID, n_cap=None, threads=1):
    """One row per (t, D), sorted by (t, D)."""
    tasks = [(t, D) for t in sorted(set(t_values)) for D in sorted(set(distances))]

    def row(task):
        t, D = task
        param = Param(t)
        cap = None if n_cap is None else max(n_cap, math.ceil(D / 2) + 2)
        est = rho_at(param, D, tol, grid=grid, n_cap=cap)
        steps = ";".join(fmt(c) for c in est.witness.lengths) if est.witness else ""
        return {
            "t": t,
            "D": D,
            "lo": est.lo,
            "hi": est.hi,
            "lower_envelope": t * D,
            "upper_envelope": D,
            "witness_steps": steps,
            "converged": est.converged,
        }

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(row, tasks))
    return [row(task) for task in tasks]


def render_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        cells = [fmt(r[c]) if c != "witness_steps" else r[c] for c in CSV_COLUMNS]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_records(rows) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def _output_path(args, default_name: str):
    if args.out:
        return Path(args.out)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        return Path(env_dir) / default_name
    return None


def _emit(text: str, path) -> int:
    if path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_profile(args) -> int:
    t_values = args.t_list or [args.t]
    rows = profile_rows(
        t_values,
        _distances(args.d_min, args.d_max, args.d_step),
        tol=args.tol,
        grid=args.grid,
        n_cap=args.ncap,
        threads=args.threads,
    )
    if args.format == "records":
        text, name = render_records(rows), "profile.jsonl"
    else:
        text, name = render_csv(rows), "profile.csv"
    code = _emit(text, _output_path(args, name))
    if code != EXIT_OK:
        return code
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_UNCONVERGED


def _mutant_metric(kind: str):
    """Deliberately broken sphere metrics for harness self-tests."""
    if kind == "drop-antipodal":
        return lambda param, p, q: np.where(
            d_E(p, q) <= param.c_star, d_E(p, q), 2.0 * param.t
        )
    if kind == "squared":
        return lambda param, p, q: d_E(p, q) ** 2
    return None


def cmd_verify(args) -> int:
    metric = _mutant_metric(args.mutation)
    t_values = args.t_list or ([args.t] if args.t is not None else list(VERIFY_T))
    reports = []
    for t in t_values:
        param = Param(t)
        reports += run_sphere_suite(param, args.samples, seed=args.seed, tol=1e-9, metric=metric)
        reports += run_space_suite(
            param, args.space_samples, box_size=args.box, seed=args.seed, tol=args.tol
        )
    render = reports_to_jsonl if args.format == "records" else format_reports
    text = render(reports) + "\n"
    code = _emit(text, _output_path(args, "verify.txt" if args.format != "records" else "verify.jsonl"))
    if code != EXIT_OK:
        return code
    if all_passed(reports):
        return EXIT_OK
    if any(not r.passed and not r.inconclusive for r in reports):
        return EXIT_FAILED
    return EXIT_INCONCLUSIVE


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser, formats, t_default) -> None:
    # added per subcommand: parents= would share Action objects, and with
    # them every set_defaults call
    p.add_argument("--config", help="key=value file; explicit flags take precedence")
    p.add_argument("--t", type=_t_value, default=t_default, help="deformation parameter in (0, 1]")
    p.add_argument("--t-list", type=_t_list, default=None, help="comma-separated t values")
    p.add_argument("--tol", type=_positive, default=1e-9, help="bracket width target")
    p.add_argument("--grid", type=_positive, default=DEFAULT_GRID, help="DP grid resolution")
    p.add_argument("--ncap", type=int, default=None, help="max steps in a witness chain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loceuclid", description="Locally Euclidean metrics d_t on S^2 and rho_t on R^3."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="bracket rho_t between two points")
    _add_common(dist, ("text", "records"), 0.6)
    dist.add_argument("--p", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    dist.add_argument("--q", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    dist.set_defaults(func=cmd_dist)

    prof = sub.add_parser("profile", help="CSV table of rho_t(D) over t")
    _add_common(prof, ("csv", "records"), 0.6)
    prof.add_argument("--d-min", type=float, default=0.0)
    prof.add_argument("--d-max", type=float, default=10.0)
    prof.add_argument("--d-step", type=_positive, default=0.5)
    prof.add_argument("--threads", type=int, default=1)
    prof.set_defaults(func=cmd_profile)

    ver = sub.add_parser("verify", help="run the sphere and space suites")
    _add_common(ver, ("text", "records"), None)
    ver.add_argument("--samples", type=int, default=20_000, help="samples per sphere check")
    ver.add_argument("--space-samples", type=int, default=200, help="samples per space check")
    ver.add_argument("--box", type=_positive, default=20.0, help="side of the sampling box")
    ver.add_argument(
        "--mutation",
        choices=("none", "drop-antipodal", "squared"),
        default="none",
        help=argparse.SUPPRESS,
    )
    ver.set_defaults(func=cmd_verify, tol=1e-5)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = _read_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(values) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        for action in sub._actions:
            if action.dest in values:
                raw = values[action.dest]
                if action.nargs == 3:
                    value = [float(x) for x in raw.replace(",", " ").split()]
                elif action.type is not None:
                    try:
                        value = action.type(raw)
                    except argparse.ArgumentTypeError as exc:
                        parser.error(f"config {action.dest}: {exc}")
                else:
                    value = raw
                sub.set_defaults(**{action.dest: value})
        args = parser.parse_args(argv)
    if args.ncap is not None and args.ncap < 1:
        parser.error("--ncap must be >= 1")
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.command == "dist" and args.ncap is not None:
        need = math.ceil(d_E(args.p, args.q) / 2) + 2
        if args.ncap < need:
            print(f"error: --ncap must be at least {need} for this pair", file=sys.stderr)
            return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
