"""Command line entry point: ``symplecta <suite> [--config PATH] [--seed N] [--out PATH] [--format json|csv]``.

Exit status is 0 when every hard check passes, 1 when one fails and 2 for a
configuration error.  Only the summary block goes to stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import ConfigError, UnsupportedFormat
from .report import (
    FORMATS,
    SUITES,
    SuiteConfig,
    emit_report,
    emit_table,
    load_config,
    run_suite,
    summary_block,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symplecta", description="Run the numerical check suites.")
    sub = parser.add_subparsers(dest="suite", required=True, metavar="suite")
    for name in SUITES + ("all",):
        p = sub.add_parser(name, help="run every suite" if name == "all" else f"run the {name} suite")
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", type=Path, help="report path (default symplecta_report.<format>)")
        p.add_argument("--format", choices=FORMATS, help="report format")
    return parser


def resolve_config(args) -> SuiteConfig:
    cfg = load_config(args.config) if args.config else SuiteConfig()
    changes = {"suite": args.suite}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        changes["seed"] = args.seed
    if args.format:
        changes["format"] = args.format
    if args.out:
        changes["output"] = str(args.out)
    return dataclasses.replace(cfg, **changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output or f"symplecta_report.{cfg.format}")
    try:
        report = run_suite(cfg)
        payload = emit_report(report, cfg.format)
    except (ConfigError, UnsupportedFormat) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(payload)
    for name, rows in report.tables.items():
        out.with_name(f"{out.stem}.{name}.csv").write_bytes(emit_table(rows))
    print(summary_block(report, out))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
