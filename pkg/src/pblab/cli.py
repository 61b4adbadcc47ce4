"""``pblab`` command line entry point.

Exit status: 0 when every assertion passes, 1 on an assertion failure, 2 on a
usage, configuration or output-path error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ExperimentConfig, load_config
from .errors import ConfigError
from .report import emit_report, format_float
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _threads(n_jobs: int) -> int:
    raw = os.environ.get("PBLAB_THREADS", "")
    if not raw:
        return 1
    try:
        t = int(raw)
    except ValueError:
        raise ConfigError(f"PBLAB_THREADS must be a positive integer, got {raw!r}") from None
    if t < 1:
        raise ConfigError(f"PBLAB_THREADS must be a positive integer, got {raw!r}")
    return min(t, n_jobs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pblab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment suite, or all of them")
    run.add_argument("suite", choices=[*SUITES, "all"])
    run.add_argument("--config", type=Path, help="JSON config file (defaults: reference parameters)")
    run.add_argument("--out", type=Path, help="output directory (overrides output_dir in the config)")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _print_report(rep, stream):
    for a in rep.assertions:
        status = "PASS" if a.passed else "FAIL"
        bound = "info" if a.bound is None else f"{a.comparison} {format_float(a.bound)}"
        print(f"{status} [{rep.suite}] {a.name}: {format_float(a.value)} ({bound})", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        names = list(SUITES) if args.suite == "all" else [args.suite]
        threads = _threads(len(names))
    except ConfigError as exc:
        print(f"pblab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_root = args.out if args.out is not None else Path(cfg.output_dir)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda n: run_suite(n, cfg), names))
    else:
        reports = [run_suite(n, cfg) for n in names]

    status = EXIT_OK
    for rep in reports:
        try:
            emit_report(rep, out_root / rep.suite, args.format)
        except OSError as exc:
            print(f"pblab: I/O error: {exc.strerror}: {exc.filename}", file=sys.stderr)
            return EXIT_USAGE
        _print_report(rep, sys.stdout)
        for a in rep.failures():
            print(f"pblab: assertion failed in suite {rep.suite}: {a.name}", file=sys.stderr)
            status = EXIT_FAIL
    return status


if __name__ == "__main__":
    sys.exit(main())
