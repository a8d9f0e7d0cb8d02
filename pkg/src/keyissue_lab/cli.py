"""Command-line front end: ``keyissue-lab run ...`` and ``keyissue-lab verify-transcript``.

Exit codes: 0 success, 1 predicate mismatch, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .channel import read_transcript, write_transcript
from .errors import ConfigurationError
from .runner import SCENARIOS, ScenarioConfig, honest_succeeded, run_scenario, verify_transcript

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

_CONFIG_KEYS = ("protocol", "scenario", "n", "q", "seed", "i", "r_star", "id", "message")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="keyissue-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one honest or attack scenario")
    run.add_argument("--config", help="JSON file mirroring these flags; flags win")
    run.add_argument("--protocol", choices=sorted(SCENARIOS))
    run.add_argument("--scenario", choices=sorted({s for v in SCENARIOS.values() for s in v}))
    run.add_argument("--n", type=int, help="number of KPAs (lee)")
    run.add_argument("--seed", type=int)
    run.add_argument("--q", type=int, help="small prime group order, for testing only")
    run.add_argument("--i", type=int, help="targeted KPA index")
    run.add_argument("--r-star", dest="r_star", type=int)
    run.add_argument("--id")
    run.add_argument("--message", help="hex-encoded message to forge a signature on")
    run.add_argument("--out", help="write the JSONL transcript here")
    expect = run.add_mutually_exclusive_group()
    expect.add_argument("--expect-success", action="store_true")
    expect.add_argument("--expect-failure", action="store_true")

    verify = sub.add_parser("verify-transcript", help="re-check every pairing equation in a transcript")
    verify.add_argument("path")
    return parser


def _config_from(args: argparse.Namespace) -> ScenarioConfig:
    values: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        for key, value in raw.items():
            key = key.replace("-", "_")
            if key in ("out", "expect_success", "expect_failure"):
                if getattr(args, key) in (None, False):
                    setattr(args, key, value)
                continue
            if key not in _CONFIG_KEYS:
                raise ConfigurationError(f"unknown config key {key!r}")
            values[key] = value
    for key in _CONFIG_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    for key in ("protocol", "scenario"):
        if key not in values:
            raise ConfigurationError(f"--{key} is required")
    return ScenarioConfig(**values)


def _run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        config = _config_from(args)
        entries, verdict = run_scenario(config)
    except (ConfigurationError, OSError, json.JSONDecodeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.out:
        write_transcript(entries, args.out)

    if verdict is None:
        ok = honest_succeeded(entries)
        print(json.dumps({"scenario": "honest", "protocol": config.protocol, "verify_private_key": ok}))
        return EXIT_OK if ok else EXIT_MISMATCH

    print(json.dumps(verdict.to_dict()))
    if args.expect_success and not verdict.success:
        return EXIT_MISMATCH
    if args.expect_failure and verdict.success:
        return EXIT_MISMATCH
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    try:
        entries = read_transcript(args.path)
        report = verify_transcript(entries)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(
        f"{report.equations} equations re-checked, {report.mismatches} mismatches, "
        f"{report.false_equations} false"
    )
    return EXIT_OK if report.ok else EXIT_MISMATCH


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "run":
        return _run(args, parser)
    return _verify(args)


if __name__ == "__main__":
    sys.exit(main())
