"""Command-line interface: select, benchmark, compare."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, rankers, search
from .core import DomainError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subsectfs",
        description="Recursive feature elimination with logarithmic-step line search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    select = sub.add_parser("select", help="select features on one dataset")
    select.add_argument("--data", required=True, help="CSV file with a header row")
    select.add_argument("--label", default="-1",
                        help="label column name or index (default: last column)")
    select.add_argument("--strategy", choices=("frfe", "ksrfe", "rfe"), default="frfe")
    select.add_argument("--k", type=int, default=3, help="subsecting points for ksrfe")
    select.add_argument("--steps", type=int, default=None,
                        help="evaluation budget for rfe (default: one size at a time)")
    select.add_argument("--ranker", choices=("logistic", "forest"), default="logistic")
    select.add_argument("--cv", type=int, default=5, help="inner CV folds")
    select.add_argument("--seed", type=int, default=0)
    select.add_argument("--metric", default="accuracy",
                        choices=sorted(harness.metrics.METRICS))
    select.add_argument("--out", default=".", help="output directory")

    bench = sub.add_parser("benchmark", help="run a configured experiment grid")
    bench.add_argument("--config", required=True, help="JSON experiment configuration")

    compare = sub.add_parser("compare", help="significance report from records.csv")
    compare.add_argument("--records", required=True,
                         help="directory containing records.csv")
    compare.add_argument("--alpha", type=float, default=0.05)
    return parser


def _cmd_select(args) -> int:
    dataset = harness.load_csv(args.data, args.label)
    strategy = "rfe_fixed" if args.strategy == "rfe" else args.strategy
    n_steps = args.steps
    if strategy == "rfe_fixed" and n_steps is None:
        n_steps = dataset.n_features  # one size at a time
    config = search.SearchConfig(
        strategy=strategy,
        ranker=rankers.RankerConfig(kind=args.ranker, seed=args.seed),
        k=args.k if strategy == "ksrfe" else None,
        n_steps=n_steps if strategy == "rfe_fixed" else None,
        cv_k=args.cv,
        seed=args.seed,
        metric=args.metric,
    )
    result = search.run_strategy(dataset, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{dataset.name}-{args.strategy}"
    harness.write_trace(result.trace, out_dir / f"trace-{stem}.jsonl")
    harness.emit_curve(result.trace, out_dir / f"curve-{stem}.csv")
    selected = sorted(result.selected)
    names = (
        [dataset.feature_names[i] for i in selected]
        if dataset.feature_names else None
    )
    summary = {
        "dataset": dataset.name,
        "strategy": args.strategy,
        "best_size": result.best_size,
        "eval_count": result.eval_count,
        "selected_indices": selected,
        "selected_names": names,
    }
    (out_dir / f"selection-{stem}.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    print(f"dataset: {dataset.name} ({dataset.n_examples} x {dataset.n_features})")
    print(f"strategy: {args.strategy}, evaluations: {result.eval_count}")
    print(f"selected {result.best_size} features in {result.wall_time:.2f} s")
    print(f"indices: {' '.join(str(i) for i in selected)}")
    return 0


def _cmd_benchmark(args) -> int:
    config = harness.load_experiment_config(args.config)
    records = harness.run_experiment(config)
    print(f"{len(records)} runs written to {config.out_dir}")
    return 0


def _cmd_compare(args) -> int:
    records_dir = Path(args.records)
    records = harness.read_records(records_dir / "records.csv")
    report = harness.significance_report(records, alpha=args.alpha)
    (records_dir / "stats.txt").write_text(report, encoding="utf-8")
    print(report, end="")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "select":
            return _cmd_select(args)
        if args.command == "benchmark":
            return _cmd_benchmark(args)
        return _cmd_compare(args)
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
