"""Command-line entry point.

    unstretch run --config cfg.json [--seed N] [--output-dir DIR]
    unstretch list

Exit codes: 0 success, 2 validation failure (the violated precondition is
named, no output files are written), 3 budget exhaustion (partial outputs are
flagged partial=true in the summary), 4 internal certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .errors import BudgetError, CertificationError, ValidationError
from .experiments import REGISTRY, list_experiments, prepare


def _write_summary(outdir: Path, payload: dict):
    (outdir / "summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )


def run_command(args) -> int:
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.output_dir is not None:
            cfg.output_dir = args.output_dir
        prep = prepare(cfg)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    summary = {
        "experiment": cfg.experiment,
        "version": __version__,
        "config": cfg.to_dict(),
        "partial": False,
        "verdicts": {},
    }
    started = time.perf_counter()
    try:
        summary["verdicts"] = REGISTRY[cfg.experiment].runner(prep, rng, outdir)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        summary["partial"] = True
        summary["error"] = str(exc)
        if exc.completed_radius is not None:
            summary["completed_radius"] = exc.completed_radius
        summary["wall_time_s"] = time.perf_counter() - started
        _write_summary(outdir, summary)
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except CertificationError as exc:
        summary["error"] = str(exc)
        summary["wall_time_s"] = time.perf_counter() - started
        _write_summary(outdir, summary)
        print(f"certification failure: {exc}", file=sys.stderr)
        return 4
    summary["wall_time_s"] = time.perf_counter() - started
    _write_summary(outdir, summary)
    print(f"{cfg.experiment}: ok ({outdir})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unstretch",
        description="Exact group-growth experiments on lattice-by-cyclic groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("--config", required=True, help="path to the JSON config")
    runp.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    runp.add_argument(
        "--output-dir", default=None, help="override the output directory"
    )
    sub.add_parser("list", help="list experiments, required fields, emitted files")
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_experiments())
        return 0
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
