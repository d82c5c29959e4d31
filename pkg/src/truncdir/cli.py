"""Command line entry point.

Subcommands mirror the harness: ``sample`` runs chains to CSV, ``diagnose``
turns an existing run directory into metric JSON files, ``oracle`` writes
grid-integrated moments, ``experiment`` chains all three.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .harness import DIAGNOSE_METRICS, cmd_diagnose, cmd_experiment, cmd_oracle, cmd_sample


def _add_config_args(sub: argparse.ArgumentParser):
    sub.add_argument("--config", required=True, help="YAML experiment config")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="override config seed")
    sub.add_argument("--chains", type=int, default=None, help="override chain count")
    sub.add_argument("--steps", type=int, default=None, help="override steps per chain")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncdir",
        description="Samplers and diagnostics for Dirichlet posteriors with truncated multinomial observations.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, text in (
        ("sample", "run the configured samplers, one CSV per chain"),
        ("experiment", "sample, then diagnostics, then oracle if enabled"),
    ):
        _add_config_args(subs.add_parser(name, help=text))

    diag = subs.add_parser("diagnose", help="compute metrics from an existing run directory")
    diag.add_argument("--in", dest="trace_dir", required=True, help="directory holding manifest.json")
    diag.add_argument(
        "--which",
        nargs="+",
        choices=DIAGNOSE_METRICS,
        default=list(DIAGNOSE_METRICS),
        help="metrics to compute",
    )
    diag.add_argument("--out", default=None, help="output directory (defaults to the run directory)")

    orc = subs.add_parser("oracle", help="grid-integrated posterior moments (n <= 4)")
    orc.add_argument("--config", required=True)
    orc.add_argument("--out", required=True)

    return parser


def _load_with_overrides(args) -> "ExperimentConfig":
    cfg = load_config(args.config)
    overrides = {
        "seed": getattr(args, "seed", None),
        "chains": getattr(args, "chains", None),
        "steps": getattr(args, "steps", None),
    }
    changed = {k: v for k, v in overrides.items() if v is not None}
    if changed:
        data = cfg.to_dict()
        data.update(changed)
        cfg = type(cfg).from_dict(data, source=args.config)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sample":
            manifest = cmd_sample(_load_with_overrides(args), args.out)
            print(manifest.path)
        elif args.command == "experiment":
            manifest = cmd_experiment(_load_with_overrides(args), args.out)
            print(manifest.path)
        elif args.command == "diagnose":
            for path in cmd_diagnose(args.trace_dir, tuple(args.which), args.out):
                print(path)
        elif args.command == "oracle":
            cfg = load_config(args.config)
            cfg.validate()
            print(cmd_oracle(cfg, args.out))
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
