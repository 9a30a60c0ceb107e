"""Command-line entry point.

Exit codes: 0 success, 1 failed check or other error, 2 invalid configuration,
3 no bound state (partial results still written), 4 corrupt cache file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from hhladder.errors import CacheCorruptError, ConfigError, HHLadderError
from hhladder.pipeline.commands import (
    FAULTS,
    cmd_converge,
    cmd_dump_matrices,
    cmd_selftest,
    cmd_spectrum,
    matrices_to_csv,
)
from hhladder.pipeline.config import CACHE_ENV, FORMATS, RunConfig, load_config
from hhladder.pipeline.report import emit, render, to_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NO_BOUND, EXIT_CACHE = 0, 1, 2, 3, 4

log = logging.getLogger("hhladder")


def _common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
    if needs_config:
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--cache-dir", help=f"potential-matrix cache directory (default: ${CACHE_ENV})")
        p.add_argument("--kmax", type=int, help="override basis.Kmax")
        p.add_argument("--n-max", type=int, help="override n_max")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, help="csv or structured (JSON)")
    p.add_argument("--quiet", action="store_true", help="only warnings on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhladder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("spectrum", help="energy ladder of one term"))

    p = sub.add_parser("converge", help="ground-state energy against Kmax")
    _common(p)
    p.add_argument("--kmax-list", required=True,
                   help="comma-separated ascending Kmax values, e.g. 0,4,8")

    p = sub.add_parser("dump-matrices", help="write W, beta, alpha, a and A for one rung")
    _common(p)
    p.add_argument("--rung", type=int, default=1, help="ladder rung n >= 1")

    p = sub.add_parser("selftest", help="run the built-in consistency checks")
    _common(p, needs_config=False)
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(cache_dir=args.cache_dir, output_path=args.output,
                              output_format=args.format, Kmax=args.kmax, n_max=args.n_max)


def _parse_kmax_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --kmax-list {text!r}") from exc


def run(args) -> int:
    if args.command == "selftest":
        summary = cmd_selftest(args.inject_fault)
        emit(to_json(summary), args.output)
        return EXIT_OK if summary["passed"] else EXIT_FAIL

    cfg = _load(args)
    if args.command == "spectrum":
        report = cmd_spectrum(cfg)
        emit(render(report, cfg.output_format), cfg.output_path)
        return EXIT_NO_BOUND if report.failure else EXIT_OK
    if args.command == "converge":
        report = cmd_converge(cfg, _parse_kmax_list(args.kmax_list))
        emit(render(report, cfg.output_format), cfg.output_path)
        if report.failure:
            return EXIT_NO_BOUND
        return EXIT_OK if report.monotone_non_increasing else EXIT_FAIL
    dump = cmd_dump_matrices(cfg, args.rung)
    text = matrices_to_csv(dump) if cfg.output_format == "csv" else to_json(dump)
    emit(text, cfg.output_path)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr, force=True)
    try:
        return run(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except CacheCorruptError as exc:
        log.error("cache corrupt: %s", exc)
        return EXIT_CACHE
    except HHLadderError as exc:
        log.error("%s", exc)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
