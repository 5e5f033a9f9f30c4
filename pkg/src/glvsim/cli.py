"""Command line entry point: ``glvsim run | validate | list-scenarios``."""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import time
from pathlib import Path

from glvsim import __version__
from glvsim.config import PROFILES, SCENARIOS, ConfigError, default_path, load_config
from glvsim.io import write_csv, write_json

OUTPUT_ROOT_ENV = "GLVSIM_OUTPUT_ROOT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

SCENARIO_HELP = {
    "point_to_point": "one transmitter, one receiver: air trace and receiver trajectory",
    "linearity_pilot": "nonlinear time fraction under prescribed inputs and scaling factors",
    "frequency_response": "gain and phase from each oscillating input to internal HOL",
    "sensitivity_heatmap": "nonlinear fraction against 85A and 91R abundance scales",
    "distance_sweep": "alarm and linearity time against transmitter distance",
    "alarm_map": "alarm state of a receiver grid at snapshot times, per wind regime",
    "single_glv_comparison": "HEXVic build-up for single-molecule emission at equal carbon cost",
}

log = logging.getLogger("glvsim")


def _output_dir(args, setup) -> Path:
    if args.out:
        return Path(args.out)
    root = os.environ.get(OUTPUT_ROOT_ENV) or setup.raw["output"]["directory"]
    return Path(root) / f"{setup.scenario}-seed{setup.seed}"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _summary_text(setup, result, wall: float) -> str:
    lines = [f"scenario: {setup.scenario}", f"seed: {setup.seed}", f"profile: {setup.profile}",
             f"wall time: {wall:.2f} s"]
    for key, val in result.summary.items():
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def write_outputs(out: Path, setup, result, wall: float) -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in sorted(result.tables.items()):
        write_csv(out / name, header, rows)
        files.append(name)
    manifest = {
        "manifest_version": 1,
        "scenario": setup.scenario,
        "seed": setup.seed,
        "package_version": __version__,
        "profile": setup.profile,
        "overrides": setup.overrides,
        "wall_time_s": wall,
        "files": {name: _sha256(out / name) for name in files},
        "summary": result.summary,
        "config": setup.to_dict(),
    }
    write_json(out / "manifest.json", manifest)
    (out / "summary.txt").write_text(_summary_text(setup, result, wall))
    return files


def cmd_run(args) -> int:
    from glvsim.analyses import run_campaign

    overrides = list(args.set or [])
    if args.scenario:
        overrides.append(f"scenario={args.scenario}")
    setup = load_config(args.config, overrides, args.profile, args.seed)
    out = _output_dir(args, setup)
    log.info("running %s (seed %d) -> %s", setup.scenario, setup.seed, out)
    t0 = time.perf_counter()
    result = run_campaign(setup, workers=args.workers)
    wall = time.perf_counter() - t0
    files = write_outputs(out, setup, result, wall)
    print(f"{setup.scenario}: wrote {', '.join(files)} to {out}")
    for key, val in result.summary.items():
        print(f"  {key}: {val}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        setup = load_config(args.config, args.set, args.profile, args.seed)
    except ConfigError as exc:
        print(f"configuration {args.config or default_path()} has {len(exc.problems)} problem(s):")
        for p in exc.problems:
            print(f"  - {p}")
        return EXIT_CONFIG
    rows = setup.parameter_table()
    width = max(len(p) for p, _, _ in rows)
    print(f"configuration {args.config or default_path()} is valid (scenario {setup.scenario})")
    print(f"{'parameter'.ljust(width)}  {'provenance':<12} value")
    for path, value, tag in rows:
        print(f"{path.ljust(width)}  {tag:<12} {value}")
    return EXIT_OK


def cmd_list(_args) -> int:
    for name in SCENARIOS:
        print(f"{name:<24} {SCENARIO_HELP[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glvsim", description="Green leaf volatile signalling simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", default=None,
                       help="YAML config or run manifest (default: the shipped parameter set)")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", default=[],
                       help="dotted override, e.g. wind.regime=nondirected_weak (repeatable)")
        p.add_argument("--profile", choices=sorted(PROFILES), default="desk",
                       help="desk: minutes on a laptop; paper: hour-scale horizons and larger grids")

    run = sub.add_parser("run", help="run a campaign and write its data files")
    common(run)
    run.add_argument("--scenario", choices=SCENARIOS, default=None, help="override the config's scenario")
    run.add_argument("--workers", type=int, default=1, help="worker processes for campaign cells")
    run.add_argument("--out", default=None,
                     help=f"output directory (default: ${OUTPUT_ROOT_ENV} or output.directory, "
                          "plus <scenario>-seed<seed>)")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a config and print its parameter provenance")
    common(val)
    val.set_defaults(func=cmd_validate)

    ls = sub.add_parser("list-scenarios", help="list the available campaigns")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    from glvsim.channel import GeometryError
    from glvsim.receiver import IntegrationError

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", 1) < 1:
        print("error [config]: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, GeometryError, FloatingPointError, ArithmeticError) as exc:
        print(f"error [numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
