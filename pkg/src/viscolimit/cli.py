"""Command line: ``viscolimit run|verify|catalog``.

Relative output directories are placed under $VISCOLIMIT_OUTPUT_ROOT when it
is set. The exit status is 0 exactly when the verdict passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .harness import ReportError, SweepConfig, SweepError, emit_report, resolve_output_dir, run_sweep, verify_field
from .initial_data import INITIAL_NAMES
from .io import read_field_csv
from .model import VISCOSITY_NAMES, flux_catalog

EXIT_FAIL = 1
EXIT_USAGE = 2


def _load_config(path: str) -> SweepConfig:
    try:
        return SweepConfig.from_file(path)
    except ValidationError as exc:
        raise SystemExit(_usage_error(f"invalid config {path}:\n{exc}"))
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot read config {path}: {exc}"))


def _usage_error(message: str) -> int:
    print(f"viscolimit: {message}", file=sys.stderr)
    return EXIT_USAGE


def _summary(report, out: Path) -> None:
    for row in report.rows:
        failed = [k for k, c in row.checks.items() if not c["pass"]]
        status = "pass" if not failed else "FAIL " + ",".join(failed)
        print(f"eps={row.eps:<8g} h={row.h:<10.4g} L1_T={row.L1_T:<12.5g} {status}")
    for name, c in report.checks.items():
        print(f"{name}: {'pass' if c['pass'] else 'FAIL'}")
    print(f"verdict: {'PASS' if report.passed else 'FAIL'} ({out})")


def cmd_run(args) -> int:
    config = _load_config(args.config)
    out = Path(args.output) if args.output else resolve_output_dir(config)
    try:
        report = run_sweep(config)
        emit_report(report, out)
    except SweepError as exc:
        print(f"viscolimit: solver aborted at {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ReportError as exc:
        return _usage_error(str(exc))
    _summary(report, out)
    return 0 if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    try:
        field = read_field_csv(args.field)
    except (OSError, ValueError) as exc:
        return _usage_error(f"cannot read field {args.field}: {exc}")
    out = Path(args.output) if args.output else resolve_output_dir(config)
    report = verify_field(field, config)
    try:
        emit_report(report, out)
    except ReportError as exc:
        return _usage_error(str(exc))
    _summary(report, out)
    return 0 if report.passed else EXIT_FAIL


def cmd_catalog(args) -> int:
    data = {
        "flux": flux_catalog(),
        "viscosity": list(VISCOSITY_NAMES),
        "initial": list(INITIAL_NAMES),
    }
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print("flux:")
        for name, desc in data["flux"].items():
            print(f"  {name:<14} {desc}")
        print("viscosity: " + ", ".join(data["viscosity"]))
        print("initial:   " + ", ".join(data["initial"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viscolimit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an eps-sweep described by a JSON config")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check a stored field (t,x[,y],u CSV) against a config")
    p.add_argument("field")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list built-in fluxes, viscosities and initial data")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
