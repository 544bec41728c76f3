"""Command-line entry point: run experiments, archive results, print the
scheme-by-depth summary table."""

import argparse
import csv
import os
import sys
import tempfile

from neuropop import rewards, trainer
from neuropop.backend import BACKEND_NAME
from neuropop.config import ExperimentConfig
from neuropop.errors import ConfigurationError

SCHEME_LABELS = {rewards.ALL: "All", rewards.BIO_THEN_ALL: "Bio->All",
                 rewards.TASK: "Task"}
TABLE_ROW_ORDER = [rewards.ALL, rewards.BIO_THEN_ALL, rewards.TASK]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="neuropop",
        description="Layered populations of neuron-level RL agents on cart-pole")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and archive results")
    run.add_argument("--config", metavar="FILE",
                     help="JSON config file (flags override its values)")
    run.add_argument("--out", required=True, metavar="DIR",
                     help="results archive directory")
    run.add_argument("--layers", type=int, dest="num_layers")
    run.add_argument("--width", type=int, dest="layer_width")
    run.add_argument("--hidden-dim", type=int, dest="hidden_dim")
    run.add_argument("--scheme", choices=sorted(rewards.SCHEME_VARIANTS))
    run.add_argument("--switch-episode", type=int, dest="switch_episode")
    run.add_argument("--episodes", type=int, dest="max_episodes")
    run.add_argument("--runs", type=int, dest="num_runs")
    run.add_argument("--seed", type=int, dest="base_seed")
    run.add_argument("--threshold", type=float, dest="solve_threshold")
    run.add_argument("--window", type=int, dest="window")
    run.add_argument("--step-size", type=float, dest="step_size")
    run.add_argument("--discount", type=float, dest="discount")
    run.add_argument("--quiet", action="store_true")

    table = sub.add_parser("table", help="print scheme x layers summary table")
    table.add_argument("archives", nargs="+", metavar="DIR",
                       help="result archive directories")
    return parser


def resolve_config(args):
    """Defaults, overridden by the config file, overridden by flags."""
    if args.config:
        config = ExperimentConfig.load(args.config)
    else:
        config = ExperimentConfig()
    overrides = {name: getattr(args, name)
                 for name in ("num_layers", "layer_width", "hidden_dim",
                              "scheme", "switch_episode", "max_episodes",
                              "num_runs", "base_seed", "solve_threshold",
                              "window", "step_size", "discount")
                 if getattr(args, name) is not None}
    if overrides:
        data = config.to_dict()
        data.update(overrides)
        config = ExperimentConfig.from_dict(data)
    return config


def _atomic_write(path, write_fn):
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".",
                               prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            write_fn(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(out_dir, summary):
    """Persist config echo, per-episode table, and summary (in that order,
    each atomically, so a summary never exists without its episode table)."""
    config = summary.config
    os.makedirs(out_dir, exist_ok=True)
    config.save(os.path.join(out_dir, "config.json"))

    def write_episodes(f):
        writer = csv.writer(f)
        writer.writerow(["run", "episode", "steps", "task_return",
                         "mean_last_window"])
        for result in summary.results:
            for i, ret in enumerate(result.returns):
                lo = max(0, i + 1 - config.window)
                mean = sum(result.returns[lo:i + 1]) / (i + 1 - lo)
                writer.writerow([result.run_seed, i + 1, int(ret), repr(ret),
                                 repr(mean)])

    _atomic_write(os.path.join(out_dir, "episodes.csv"), write_episodes)

    def write_summary(f):
        writer = csv.writer(f)
        writer.writerow(["scheme", "layers", "width", "mean_episodes_to_solve",
                         "solved", "runs", "base_seed"])
        writer.writerow([config.scheme, config.num_layers, config.layer_width,
                         repr(summary.mean_episodes_to_solve),
                         summary.solved_count, config.num_runs,
                         config.base_seed])

    _atomic_write(os.path.join(out_dir, "summary.csv"), write_summary)


def read_summary(archive_dir):
    path = os.path.join(archive_dir, "summary.csv")
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if len(rows) != 1:
        raise ConfigurationError(f"{path}: expected exactly one summary row")
    return rows[0]


def format_table(summaries):
    """Grid of mean episodes-to-solve: rows = schemes, columns = layer counts."""
    cells = {}
    for row in summaries:
        key = (row["scheme"], int(row["layers"]))
        cells[key] = float(row["mean_episodes_to_solve"])
    layer_counts = sorted({k[1] for k in cells})
    if not layer_counts:
        layer_counts = [1]
    header = ["Reward"] + [f"{n} layer" + ("s" if n > 1 else "")
                           for n in layer_counts]
    lines = []
    rows = [header]
    for scheme in TABLE_ROW_ORDER:
        row = [SCHEME_LABELS[scheme]]
        for n in layer_counts:
            value = cells.get((scheme, n))
            row.append("—" if value is None else f"{value:,.0f}")
        rows.append(row)
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    for r in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
    return "\n".join(lines)


def cmd_run(args):
    config = resolve_config(args)

    def progress(result):
        if args.quiet:
            return
        status = (f"solved in {result.episodes_to_solve}" if result.solved
                  else "diverged" if result.diverged else "not solved")
        print(f"run seed={result.run_seed}: {status} "
              f"({len(result.returns)} episodes, {result.wall_time:.1f}s)")

    if not args.quiet:
        print(f"backend: {BACKEND_NAME}")
    summary = trainer.run_experiment(config, progress=progress)
    write_results(args.out, summary)
    if not args.quiet:
        print(f"mean episodes to solve: {summary.mean_episodes_to_solve:.1f} "
              f"({summary.solved_count}/{config.num_runs} solved)")
        print(f"archive written to {args.out}")
    return 0


def cmd_table(args):
    summaries = [read_summary(d) for d in args.archives]
    print(format_table(summaries))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "table":
            return cmd_table(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
