"""Command-line entry point.

    ringtc <experiment> [--config FILE] [--seed S] [--out DIR]
    ringtc print-defaults [experiment]

Exit codes: 0 success, 2 configuration error, 3 compute error.  Compute
errors additionally leave a structured error.json in the output directory.
The cache location honors the RINGTC_CACHE_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import (
    EXPERIMENTS,
    ConfigError,
    RunConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    run,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringtc",
        description="Ring time-crystal simulator: exact diagonalization, "
                    "measurement collapse, and mean-field cross-checks.")
    parser.add_argument("experiment",
                        choices=list(EXPERIMENTS) + ["print-defaults"],
                        help="experiment to run, or print-defaults")
    parser.add_argument("rest", nargs="?", default=None,
                        help="experiment name for print-defaults")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file (defaults used when omitted)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the seed list with a single seed")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default runs/<experiment>)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="INFO-level logging")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")

    if args.experiment == "print-defaults":
        experiment = args.rest or "correlation"
        if experiment not in EXPERIMENTS:
            print(f"unknown experiment {experiment!r}", file=sys.stderr)
            return 2
        print(json.dumps(config_to_dict(config_from_dict(
            {"experiment": experiment})), sort_keys=True, indent=2))
        return 0

    try:
        if args.config is not None:
            cfg = load_config(args.config, experiment=args.experiment)
        else:
            cfg = config_from_dict({"experiment": args.experiment})
        overrides = {}
        if args.seed is not None:
            overrides["seeds"] = [args.seed]
        if args.out is not None:
            overrides["output_dir"] = str(args.out)
        if overrides:
            data = config_to_dict(cfg)
            data.update(overrides)
            cfg = config_from_dict(data)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        summary = run(cfg)
    except Exception as exc:  # compute error: structured report, exit 3
        out = cfg.out_dir()
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(json.dumps(
                {"error": type(exc).__name__, "message": str(exc)},
                sort_keys=True, indent=2) + "\n")
        except OSError:
            pass
        print(f"compute error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
