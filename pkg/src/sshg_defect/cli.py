"""Command-line entry point: ``verify``, ``simulate`` and ``dump``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import traceback

EXIT_OK, EXIT_CONFIG, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("sshg_defect")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    from . import checks
    from .defects import ConventionMismatch

    try:
        ids = checks.select(args.filter)
        reports = []
        if ids:
            try:
                conv = checks.resolve_convention(args.convention)
            except ConventionMismatch as exc:
                conv = args.convention
                reports.append(checks.Report("convention", "fail", 1, conv, 0, f"ConventionMismatch: {exc}"))
                reports += [checks.Report(i, "skipped", 0, conv, 0, "convention lock failed") for i in ids]
                print(f"ConventionMismatch: {exc}", file=sys.stderr)
            else:
                reports = checks.run_checks(ids, conv, args.workers)
        reports.sort(key=lambda r: r.check_id)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    _emit(json.dumps([r.as_dict() for r in reports], indent=2) + "\n", args.out)
    failed = [r.check_id for r in reports if r.status == "fail"]
    for r in reports:
        log.info("%-28s %-7s %6d ms %s", r.check_id, r.status, r.elapsed_ms, r.notes)
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulator import ConfigError, NumericBlowup, load_config, run

    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "timeseries.csv")
    summary_path = os.path.join(args.out, "summary.json")
    try:
        result = run(cfg, csv_path, summary_path)
    except NumericBlowup as exc:
        print(f"numeric blowup: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    json.dump(result.summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_dump(args) -> int:
    from . import catalog
    from .symexpr import parse, to_text

    if args.list:
        sys.stdout.write("\n".join(catalog.NAMES) + "\n")
        return EXIT_OK
    if not args.name:
        print("dump: a catalog name is required (see --list)", file=sys.stderr)
        return EXIT_CONFIG
    try:
        e = catalog.get(args.name)
    except catalog.UnknownName:
        print(f"UnknownName: {args.name!r}; known names: {', '.join(catalog.NAMES)}", file=sys.stderr)
        return EXIT_CONFIG
    text = to_text(e)
    if args.check and parse(text) != e:
        print("round trip failed", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sshg-defect", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run symbolic verification checks")
    v.add_argument("--filter", default=None, help="check-id glob(s), comma separated")
    v.add_argument("--convention", default="auto", choices=("auto", "left", "right"))
    v.add_argument("--out", default=None, help="JSON report path (stdout if omitted)")
    v.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $SSHG_WORKERS or cpu count)")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("simulate", help="run a bosonic-limit simulation")
    s.add_argument("config")
    s.add_argument("--out", default="sim_out", help="output directory for CSV and summary")
    s.set_defaults(fn=cmd_simulate)

    d = sub.add_parser("dump", help="print a catalog expression")
    d.add_argument("name", nargs="?")
    d.add_argument("--list", action="store_true", help="list catalog names")
    d.add_argument("--check", action="store_true", help="verify parse(dump(X)) == X")
    d.set_defaults(fn=cmd_dump)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
