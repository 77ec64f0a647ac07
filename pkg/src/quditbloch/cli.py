"""Command-line interface: ``quditbloch {simulate,constants,validate,benchmark}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .basis import basis_labels, full_basis
from .config import ConfigError, load_config
from .integrator import NumericalError
from .runs import benchmark, column_names, corrupted_tables, simulate, validate
from .structure import structure_tables
from .wigner import HalfInteger

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4

log = logging.getLogger("quditbloch")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_trajectory(cfg, traj, path: Path, fmt: str) -> dict:
    cols = ["t"] + column_names(cfg.system) + list(traj.monitors)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for i, t in enumerate(traj.times):
                row = [t, *traj.states[i], *(traj.monitors[m][i] for m in traj.monitors)]
                w.writerow([_fmt(float(v)) for v in row])
    else:
        data = {
            "columns": cols,
            "rows": [
                [float(t), *map(float, traj.states[i]), *(float(traj.monitors[m][i]) for m in traj.monitors)]
                for i, t in enumerate(traj.times)
            ],
        }
        path.write_text(json.dumps(data))
    meta = {
        "spins": [str(s) for s in cfg.system.spins],
        "columns": cols,
        "labels": [
            {"flat_index": i, "column": c, "qudit_labels": [str(l) for l in labs]}
            for i, (c, labs) in enumerate(zip(column_names(cfg.system), cfg.system.labels()))
        ],
        "per_qudit_labels": [[str(l) for l in basis_labels(s)] for s in cfg.system.spins],
        "config": cfg.raw,
        "version": __version__,
    }
    meta_path = path.with_name(path.stem + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2))
    return {"trajectory": str(path), "metadata": str(meta_path)}


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.output) if args.output else (cfg.output_path or Path("trajectory.csv"))
    fmt = cfg.output_format
    if args.output and Path(args.output).suffix in (".csv", ".json"):
        fmt = Path(args.output).suffix[1:]
    traj = simulate(cfg)
    files = _write_trajectory(cfg, traj, out, fmt)
    if not args.no_plot:
        from .plotting import plot_trajectory
        files["figure"] = str(plot_trajectory(traj, out.with_suffix(".png")))
    summary = {
        "samples": len(traj.times),
        "t_final": float(traj.times[-1]),
        "drift": {k: traj.drift(k) for k in traj.monitors if k != "min_eig"},
        "files": files,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_constants(args) -> int:
    try:
        spin = HalfInteger.parse(args.spin)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid spin {args.spin!r}: {exc}") from None
    if spin.twice_value < 1:
        raise ConfigError("spin must be >= 1/2")
    tables = structure_tables(spin, args.route)
    doc = {"spin": str(spin), "route": args.route, **tables.as_lists()}
    if args.basis:
        doc["basis"] = [
            {"index": i, "label": str(lab), "real": M.real.tolist(), "imag": M.imag.tolist()}
            for i, (lab, M) in enumerate(full_basis(spin))
        ]
    text = json.dumps(doc)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    tables = corrupted_tables(cfg.system) if args.corrupt_structure else None
    report, check = validate(cfg, tables, args.tol)
    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps({**report, "per_time": check.as_dict()}, indent=2))
        if not args.no_plot:
            from .plotting import plot_cross_check
            report["figure"] = str(plot_cross_check(check, out.with_suffix(".png"), tol=report["tolerance"]))
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_benchmark(args) -> int:
    cfg = load_config(args.config)
    report = benchmark(cfg, args.steps)
    text = json.dumps(report, indent=2)
    if args.output:
        Path(args.output).write_text(text)
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quditbloch", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate the Bloch equations and write a trajectory")
    s.add_argument("--config", required=True)
    s.add_argument("--output")
    s.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("constants", help="dump structure constants as JSON")
    c.add_argument("--spin", required=True)
    c.add_argument("--output")
    c.add_argument("--route", choices=("trace", "analytic"), default="trace")
    c.add_argument("--basis", action="store_true", help="include basis matrices")
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("validate", help="compare against the density-matrix reference")
    v.add_argument("--config", required=True)
    v.add_argument("--tol", type=float)
    v.add_argument("--output")
    v.add_argument("--no-plot", action="store_true")
    v.add_argument("--corrupt-structure", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("benchmark", help="time real vs complex RK4 steps")
    b.add_argument("--config", required=True)
    b.add_argument("--steps", type=int)
    b.add_argument("--output")
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
