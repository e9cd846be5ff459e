"""Command-line interface.

    medclip zo run <config> [--seed N] [--runs N] [--out DIR] [--workers N]
    medclip bandit run <config> [...]
    medclip grid <config> <gridspec> [--out DIR]
    medclip aggregate <dir>

Exit codes: 0 on success, 2 on a config error, 3 when every run of an
experiment failed numerically.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, NumericalError, ParameterError, ScheduleError
from .harness import aggregate_dir, gridsearch, load_config, load_grid, run_experiment

ZO_KINDS = ("zo_sstm", "zo_smd", "zo_restarted", "zo_sgd")
BANDIT_KINDS = ("bandit", "full_feedback")


def _add_run_flags(p):
    p.add_argument("config", help="INI experiment config")
    p.add_argument("--seed", type=int, default=None, help="override base seed")
    p.add_argument("--runs", type=int, default=None, help="override run count")
    p.add_argument("--out", default=None, help="override output directory")
    p.add_argument("--workers", type=int, default=None, help="override worker count")


def build_parser():
    parser = argparse.ArgumentParser(prog="medclip", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    zo = sub.add_parser("zo", help="zeroth-order optimization experiments")
    zo_sub = zo.add_subparsers(dest="action", required=True)
    _add_run_flags(zo_sub.add_parser("run", help="run a zo experiment"))

    bandit = sub.add_parser("bandit", help="multi-armed bandit experiments")
    bandit_sub = bandit.add_subparsers(dest="action", required=True)
    _add_run_flags(bandit_sub.add_parser("run", help="run a bandit experiment"))

    grid = sub.add_parser("grid", help="gridsearch over schedule overrides")
    grid.add_argument("config")
    grid.add_argument("gridspec")
    grid.add_argument("--out", default=None)
    grid.add_argument("--seed", type=int, default=None)
    grid.add_argument("--runs", type=int, default=None)
    grid.add_argument("--workers", type=int, default=None)

    agg = sub.add_parser("aggregate", help="recompute aggregates from per-run CSVs")
    agg.add_argument("dir")
    return parser


def _overrides(args):
    ov = {}
    if getattr(args, "seed", None) is not None:
        ov[("experiment", "base_seed")] = str(args.seed)
    if getattr(args, "runs", None) is not None:
        ov[("experiment", "runs")] = str(args.runs)
    if getattr(args, "out", None) is not None:
        ov[("experiment", "out")] = args.out
    if getattr(args, "workers", None) is not None:
        ov[("experiment", "workers")] = str(args.workers)
    return ov


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("zo", "bandit"):
            cfg = load_config(args.config, overrides=_overrides(args))
            kind = cfg["experiment"]["kind"]
            allowed = ZO_KINDS if args.command == "zo" else BANDIT_KINDS
            if kind not in allowed:
                raise ConfigError(
                    f"experiment kind {kind!r} does not belong to 'medclip {args.command}'"
                )
            meta = run_experiment(cfg)
            print(f"completed {len(meta['completed'])}/{meta['n_runs']} runs -> "
                  f"{cfg['experiment']['out']}")
            if meta["failures"]:
                print(f"failed runs: {sorted(meta['failures'])}", file=sys.stderr)
        elif args.command == "grid":
            cfg = load_config(args.config, overrides=_overrides(args))
            result = gridsearch(cfg, load_grid(args.gridspec))
            best = result["best"]
            if best is not None:
                print(f"best cell {best[0]}: {best[1]} (median final {best[2]:.6g})")
            print(f"summary -> {result['summary_file']}")
        elif args.command == "aggregate":
            for path in aggregate_dir(args.dir):
                print(path)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ScheduleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
