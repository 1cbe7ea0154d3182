"""Command-line entry point: ``laminar {estimates,smooth,currents,counterexample,all}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ExperimentConfig, default_config_text, load_config
from .errors import LaminarError
from .suites import run_suites

log = logging.getLogger("laminar")

ORDER = ["estimates", "smooth", "currents", "counterexample"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="laminar", description=__doc__)
    p.add_argument("suite", choices=ORDER + ["all", "show-config"],
                   help="suite to run ('show-config' prints the default configuration)")
    p.add_argument("--config", metavar="PATH", help="INI experiment configuration")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", metavar="DIR", help="output directory (default from config: results)")
    p.add_argument("--jobs", type=int, help="worker processes for per-family work")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.suite == "show-config":
        sys.stdout.write(default_config_text())
        return 0
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.jobs is not None:
            cfg.jobs = args.jobs
        cfg.validate()
        names = ORDER if args.suite == "all" else [args.suite]
        ok, results = run_suites(cfg, names, cfg.out)
    except LaminarError as exc:
        print(f"laminar: error: {exc}", file=sys.stderr)
        return 2
    for r in results:
        print(f"{r.name}: {'PASS' if r.passed else 'FAIL'} ({', '.join(r.artifacts)})")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
