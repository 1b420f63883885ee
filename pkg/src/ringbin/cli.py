"""Command-line front end: ``ringbin run|validate|list-scenarios``.

Exit codes: 0 success, 1 configuration error, 2 stage failure,
3 a ``--check`` threshold missed.
"""

from __future__ import annotations

import argparse
import json
import sys

import yaml

from ._heap import retain_heap
from .scenario import (ConfigError, StageError, bundled_scenarios, load_scenario, resolve,
                       run_scenario, validate_config)

EXIT_OK, EXIT_CONFIG, EXIT_STAGE, EXIT_CHECK = 0, 1, 2, 3


def _overrides(pairs: list[str]) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        parsed = yaml.safe_load(value)
        if isinstance(parsed, str):
            # YAML 1.1 leaves exponents without a dot (1e9) as strings
            try:
                parsed = float(parsed)
            except ValueError:
                pass
        out[key.strip()] = parsed
    return out


def _cmd_run(args) -> int:
    try:
        path = resolve(args.scenario)
        sc = load_scenario(path, _overrides(args.set))
    except (FileNotFoundError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or f"out/{sc.name}"
    try:
        summary = run_scenario(sc, out)
    except StageError as exc:
        print(f"stage failure {exc}", file=sys.stderr)
        return EXIT_STAGE
    for name, ok in sorted(summary["checks"].items()):
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"wrote {out}/summary.json")
    if args.check and not summary["passed"]:
        return EXIT_CHECK
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        diags = validate_config(resolve(args.scenario))
    except (FileNotFoundError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for d in diags:
        print(d)
    if any(d.level == "error" for d in diags):
        return EXIT_CONFIG
    if not diags:
        print("ok")
    return EXIT_OK


def _cmd_list(args) -> int:
    for name, path in bundled_scenarios().items():
        try:
            desc = load_scenario(path).description
        except ConfigError:
            desc = "(invalid)"
        print(f"{name:16s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringbin", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or bundled scenario name")
    run.add_argument("scenario")
    run.add_argument("--out", help="output directory (default out/<name>)")
    run.add_argument("--check", action="store_true", help="exit 3 if any scenario check fails")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a field, e.g. ring.backscatter_r=0")
    run.set_defaults(func=_cmd_run)
    val = sub.add_parser("validate", help="report configuration problems")
    val.add_argument("scenario")
    val.set_defaults(func=_cmd_validate)
    ls = sub.add_parser("list-scenarios", help="list bundled scenarios")
    ls.set_defaults(func=_cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    retain_heap()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
