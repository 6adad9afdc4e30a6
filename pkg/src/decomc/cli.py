"""Command-line entry point ``decomc``.

Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence
(rows were written with NaN markers), 3 oracle mismatch beyond tolerance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bath import n_eff_si
from .config import load_config, parse_overrides
from .errors import ConfigError, DecomcError
from .scenario import render_csv, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE = 0, 1, 2, 3

SCENARIO_COMMANDS = ("thermal", "micro", "compare", "oracle", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decomc",
        description="Qubit decoherence in canonical and microcanonical oscillator baths.",
    )
    parser.add_argument("--version", action="version", version=f"decomc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "thermal": "canonical exponent Q and |C| on the t grid",
        "micro": "microcanonical coherence and its 1/N_eff corrections",
        "compare": "microcanonical vs canonical, with the gap |C_micro - C_thermal|",
        "oracle": "contour and canonical results checked against Fock-space sums",
        "sweep": "repeat a command over the values of one config key",
    }
    for name in SCENARIO_COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, help="scenario file (schema v1)")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config key; repeatable")
        p.add_argument("--t", help="override drive.t (comma-separated)")
        p.add_argument("--beta", help="override ensemble.beta")
        p.add_argument("--out", help="override output.path ('-' for stdout)")
        p.add_argument("--threads", type=int, help="worker threads (default: DECOMC_THREADS)")
    p = sub.add_parser("neff", help="thermally populated modes of a line of length L at T")
    p.add_argument("--L", type=float, required=True, help="line length in metres")
    p.add_argument("--T", type=float, required=True, help="temperature in kelvin")
    return parser


def _neff(args) -> int:
    try:
        value = n_eff_si(args.L, args.T)
    except ValueError as exc:
        print(f"decomc: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"N_eff = {value:.3g}")
    print("order of magnitude: about 10 populated modes for a 1 m line at 0.1 K")
    return EXIT_OK


def _scenario(args) -> int:
    overrides = parse_overrides(args.set)
    for flag, key in ((args.t, "drive.t"), (args.beta, "ensemble.beta"), (args.out, "output.path")):
        if flag is not None:
            overrides[key] = flag
    cfg = load_config(args.config, overrides=overrides)
    if args.threads is not None and args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    table = run_scenario(cfg, args.command, threads=args.threads)
    text = render_csv(table)
    out = cfg["output.path"]
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    for d in table.diagnostics:
        print(f"decomc: row failed: {d}", file=sys.stderr)
    if table.oracle_failed:
        print("decomc: oracle mismatch beyond numerics.oracle_tol", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_NUMERIC if table.failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "neff":
        return _neff(args)
    try:
        return _scenario(args)
    except ConfigError as exc:
        print(f"decomc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecomcError as exc:
        print(f"decomc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
