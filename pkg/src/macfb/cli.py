"""``macfb <subcommand> [--config cfg.json] [--seed S] [--trials T] [--out DIR] [--threads N]``.

Exit status: 0 on success, 2 when the configuration or inputs are invalid,
1 for any other failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import UnknownVariableError, ValidationError
from .harness import COMMANDS

# which config key --trials maps to, per subcommand
TRIAL_KEYS = {"simulate": "trials", "sumcode": "draws", "region": "draws"}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macfb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=_u64, help="master seed (overrides the config)")
        p.add_argument("--trials", type=int, help="trial / draw count (overrides the config)")
        p.add_argument("--out", type=Path, help="output directory for CSV and JSON files")
        p.add_argument("--threads", type=int, help="worker threads")
    return parser


def resolve_config(args) -> dict:
    cfg = {}
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ValidationError("config must be a JSON object")
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.trials is not None:
        key = TRIAL_KEYS.get(args.command)
        if key is None:
            raise ValidationError(f"--trials does not apply to {args.command}")
        cfg[key] = args.trials
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = resolve_config(args)
        bundle = COMMANDS[args.command](cfg)
        if args.out is not None:
            for path in bundle.write(args.out):
                print(path)
        else:
            sys.stdout.write(bundle.tables["summary"].to_csv())
    except (ValidationError, UnknownVariableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0
