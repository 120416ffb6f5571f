"""Experiment orchestration: dataset ingestion, runs, and result persistence.

An experiment crosses datasets x strategies x repetitions. Each repetition
reserves one outer stratified fold as a test set, runs the selector with
inner cross-validation on the remainder, retrains on the selected features,
and scores the test fold. Baselines declared with ``match`` are configured
with the evaluation count their partner strategy spent in the same
repetition, mechanizing the step-matched comparison.

All persisted artifacts except ``timings.csv`` are byte-deterministic for a
fixed seed; wall-clock times are therefore kept out of records.csv and
summary.csv.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import crossval, metrics, preprocess, rankers, search, stats
from .core import Dataset, DomainError, SearchTrace

OUTER_ROLE, INNER_ROLE, RANKER_ROLE = 0, 1, 2

REPORT_METRICS = ("accuracy", "kappa", "macro_recall", "g_mean")
RECORD_COLUMNS = (
    "dataset", "strategy", "repetition", "selected_size", "eval_count",
    "accuracy", "kappa", "macro_recall", "g_mean", "selected_indices",
)


class IngestionError(DomainError):
    """A CSV cell or row could not be turned into dataset content."""


def load_csv(path, label_column) -> Dataset:
    """Read a rectangular CSV with a header row into a Dataset.

    ``label_column`` is a header name or a (possibly negative) column index.
    Feature cells must parse as finite numbers; labels may be arbitrary
    strings and are normalized to 0..C-1 with the originals kept in
    ``label_names``.
    """
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise IngestionError(f"{path}: no data rows")

    if isinstance(label_column, int) or (
        isinstance(label_column, str) and label_column.lstrip("-").isdigit()
    ):
        label_idx = int(label_column)
        if not -len(header) <= label_idx < len(header):
            raise IngestionError(f"{path}: label column index {label_idx} out of range")
        label_idx %= len(header)
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise IngestionError(
                f"{path}: no column named {label_column!r} in header"
            ) from None

    feature_names = tuple(name for i, name in enumerate(header) if i != label_idx)
    raw_labels: list[str] = []
    values = np.empty((len(rows), len(header) - 1), dtype=np.float64)
    for r, row in enumerate(rows, start=2):  # header is line 1
        if len(row) != len(header):
            raise IngestionError(
                f"{path}: row {r} has {len(row)} cells, expected {len(header)}"
            )
        c_out = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                raw_labels.append(cell)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: row {r}, column {header[c]!r}: "
                    f"not a number: {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise IngestionError(
                    f"{path}: row {r}, column {header[c]!r}: non-finite value {cell!r}"
                )
            values[r - 2, c_out] = value
            c_out += 1

    distinct = sorted(set(raw_labels), key=_label_sort_key)
    if len(distinct) < 2:
        raise IngestionError(f"{path}: only one class present")
    label_of = {raw: i for i, raw in enumerate(distinct)}
    labels = np.array([label_of[raw] for raw in raw_labels], dtype=np.int64)
    return Dataset(
        features=values,
        labels=labels,
        n_classes=len(distinct),
        feature_names=feature_names,
        label_names=tuple(distinct),
        name=path.stem,
    )


def _label_sort_key(raw: str):
    try:
        return (0, float(raw), raw)
    except ValueError:
        return (1, 0.0, raw)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    label: str | int = -1
    name: str | None = None


@dataclass(frozen=True)
class StrategySpec:
    """One selector to benchmark; ``match`` pairs a fixed-step baseline."""

    strategy: str
    k: int | None = None
    n_steps: int | None = None
    match: str | None = None
    id: str = ""

    def __post_init__(self):
        if self.strategy not in search.STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "ksrfe" and (self.k is None or self.k < 2):
            raise DomainError("ksrfe strategy needs k >= 2")
        if self.strategy == "rfe_fixed" and (self.n_steps is None) == (self.match is None):
            raise DomainError("rfe_fixed needs exactly one of n_steps or match")
        if self.match is not None and self.strategy != "rfe_fixed":
            raise DomainError("only rfe_fixed baselines can match another strategy")
        if not self.id:
            object.__setattr__(self, "id", self._default_id())

    def _default_id(self) -> str:
        if self.strategy == "frfe":
            return "frfe"
        if self.strategy == "ksrfe":
            return f"{self.k}-srfe"
        if self.match == "frfe":
            return "rfe-f"
        if self.match is not None:
            return "rfe-" + self.match.replace("-srfe", "")
        return f"rfe-n{self.n_steps}"


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    strategies: tuple[StrategySpec, ...]
    ranker: rankers.RankerConfig = field(default_factory=rankers.RankerConfig)
    cv_k: int = 5
    outer_k: int = 5
    repetitions: int = 10
    seed: int = 0
    out_dir: str = "results"
    metric: str = "accuracy"
    alpha: float = 0.05

    def __post_init__(self):
        if not self.datasets or not self.strategies:
            raise DomainError("need at least one dataset and one strategy")
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")
        ids = [spec.id for spec in self.strategies]
        if len(set(ids)) != len(ids):
            raise DomainError(f"duplicate strategy ids: {ids}")
        seen = set()
        for spec in self.strategies:
            if spec.match is not None and spec.match not in seen:
                raise DomainError(
                    f"baseline {spec.id!r} matches {spec.match!r}, which must "
                    "appear earlier in the strategy list"
                )
            seen.add(spec.id)


def load_experiment_config(path) -> ExperimentConfig:
    """Parse the JSON configuration file for the benchmark command."""
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    datasets = tuple(
        DatasetSpec(path=d["path"], label=d.get("label", -1), name=d.get("name"))
        for d in doc.get("datasets", [])
    )
    strategies = tuple(
        StrategySpec(
            strategy=s["strategy"],
            k=s.get("k"),
            n_steps=s.get("n_steps"),
            match=s.get("match"),
            id=s.get("id", ""),
        )
        for s in doc.get("strategies", [])
    )
    ranker = ranker_config_from_dict(doc.get("ranker", {}))
    return ExperimentConfig(
        datasets=datasets,
        strategies=strategies,
        ranker=ranker,
        cv_k=doc.get("cv_k", 5),
        outer_k=doc.get("outer_k", 5),
        repetitions=doc.get("repetitions", 10),
        seed=doc.get("seed", 0),
        out_dir=doc.get("out_dir", "results"),
        metric=doc.get("metric", "accuracy"),
        alpha=doc.get("alpha", 0.05),
    )


def ranker_config_from_dict(doc: dict) -> rankers.RankerConfig:
    logistic = rankers.LogisticParams(**doc.get("logistic", {}))
    forest = rankers.ForestParams(**doc.get("forest", {}))
    return rankers.RankerConfig(
        kind=doc.get("kind", "logistic"),
        seed=doc.get("seed", 0),
        logistic=logistic,
        forest=forest,
    )


def derive_seed(master: int, *key) -> int:
    """Counter-style subseed independent of execution order."""
    state = np.random.SeedSequence(master, spawn_key=tuple(key)).generate_state(1)
    return int(state[0])


# ---------------------------------------------------------------------------
# run records


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    strategy: str
    repetition: int
    selected_size: int
    selected: tuple[int, ...]
    wall_time: float
    accuracy: float
    kappa: float
    macro_recall: float
    g_mean: float
    eval_count: int

    def __post_init__(self):
        for name in ("accuracy", "macro_recall", "g_mean"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DomainError(f"{name} outside [0, 1]")
        if not -1.0 <= self.kappa <= 1.0:
            raise DomainError("kappa outside [-1, 1]")

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


def _score_model(model, X_test, y_test, n_classes) -> dict[str, float]:
    cm = metrics.confusion(y_test, model.predict(X_test), n_classes=n_classes)
    return {name: float(metrics.METRICS[name](cm)) for name in REPORT_METRICS}


def run_split(
    dataset: Dataset,
    train_rows: np.ndarray,
    test_rows: np.ndarray,
    search_cfg: search.SearchConfig,
):
    """Select on the training rows only, then score the held-out rows.

    The test rows never influence scaling, ranking, or selection; they are
    touched only by the final prediction pass.
    """
    train_ds = dataset.subset_rows(train_rows)
    result = search.run_strategy(train_ds, search_cfg)
    columns = sorted(result.selected)
    scaler = preprocess.fit_minmax(train_ds.features[:, columns])
    model = rankers.train(
        search_cfg.ranker,
        preprocess.apply_minmax(scaler, train_ds.features[:, columns]),
        train_ds.labels,
        feature_subset=columns,
        n_classes=dataset.n_classes,
    )
    scored = _score_model(
        model,
        preprocess.apply_minmax(scaler, dataset.features[test_rows][:, columns]),
        dataset.labels[test_rows],
        dataset.n_classes,
    )
    return result, scored


def run_single(
    dataset: Dataset,
    spec: StrategySpec,
    repetition: int,
    config: ExperimentConfig,
    dataset_index: int,
    n_steps_override: int | None = None,
) -> tuple[RunRecord, SearchTrace]:
    """One (dataset, strategy, repetition) cell of the experiment grid."""
    outer_seed = derive_seed(config.seed, dataset_index, OUTER_ROLE,
                             repetition // config.outer_k)
    outer = crossval.stratified_folds_canonical(dataset, config.outer_k, outer_seed)
    test_fold = repetition % config.outer_k
    train_rows, test_rows = outer.train_validation(test_fold)
    search_cfg = search.SearchConfig(
        strategy=spec.strategy,
        ranker=replace(
            config.ranker,
            seed=derive_seed(config.seed, dataset_index, RANKER_ROLE, repetition),
        ),
        k=spec.k,
        n_steps=n_steps_override if n_steps_override is not None else spec.n_steps,
        cv_k=config.cv_k,
        seed=derive_seed(config.seed, dataset_index, INNER_ROLE, repetition),
        metric=config.metric,
    )
    result, scored = run_split(dataset, train_rows, test_rows, search_cfg)
    record = RunRecord(
        dataset=dataset.name,
        strategy=spec.id,
        repetition=repetition,
        selected_size=result.best_size,
        selected=tuple(sorted(result.selected)),
        wall_time=result.wall_time,
        eval_count=result.eval_count,
        **scored,
    )
    return record, result.trace


def run_experiment(config: ExperimentConfig, datasets=None):
    """Run the whole grid and persist records, summary, traces, and reports.

    ``datasets`` may supply pre-built Dataset objects (e.g. synthetic data);
    otherwise the configured CSV paths are loaded. Failed runs are recorded
    and skipped; the experiment fails only if every run failed.
    """
    if datasets is None:
        datasets = [
            replace(load_csv(d.path, d.label), name=d.name) if d.name
            else load_csv(d.path, d.label)
            for d in config.datasets
        ]
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records: list[RunRecord] = []
    failures: list[str] = []
    for d_idx, dataset in enumerate(datasets):
        for rep in range(config.repetitions):
            eval_counts: dict[str, int] = {}
            for spec in config.strategies:
                override = None
                if spec.match is not None:
                    if spec.match not in eval_counts:
                        failures.append(
                            f"{dataset.name}/{spec.id}/rep{rep}: matched strategy "
                            f"{spec.match!r} did not produce an evaluation count"
                        )
                        continue
                    override = max(2, eval_counts[spec.match])
                try:
                    record, trace = run_single(
                        dataset, spec, rep, config, d_idx, n_steps_override=override
                    )
                except DomainError as err:
                    failures.append(f"{dataset.name}/{spec.id}/rep{rep}: {err}")
                    continue
                records.append(record)
                eval_counts[spec.id] = record.eval_count
                stem = f"{dataset.name}-{spec.id}-r{rep}"
                write_trace(trace, out_dir / f"trace-{stem}.jsonl")
                emit_curve(trace, out_dir / f"curve-{stem}.csv")

    if not records:
        raise DomainError("all runs failed: " + "; ".join(failures[:5]))
    write_records(records, out_dir / "records.csv")
    write_timings(records, out_dir / "timings.csv")
    write_summary(records, out_dir / "summary.csv")
    report = significance_report(records, alpha=config.alpha)
    (out_dir / "stats.txt").write_text(report, encoding="utf-8")
    if failures:
        (out_dir / "errors.txt").write_text(
            "\n".join(failures) + "\n", encoding="utf-8"
        )
    return records


# ---------------------------------------------------------------------------
# persistence


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def write_trace(trace: SearchTrace, path) -> None:
    """One JSON object per evaluated size, in evaluation order."""
    lines = []
    for seq, (size, entry) in enumerate(trace.entries.items()):
        lines.append(json.dumps({
            "seq": seq,
            "size": size,
            "fold_scores": list(entry.per_fold_scores),
            "ranking": list(entry.aggregated_ranking.order),
        }, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_curve(trace: SearchTrace, out) -> None:
    """Plot-ready CSV of mean validation score against subset size."""
    if trace.eval_count == 0:
        raise DomainError("cannot emit a curve from an empty trace")
    with open(out, "w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["subset_size", "mean_score", "score_sd"])
        for size in sorted(trace.entries, reverse=True):
            scores = np.asarray(trace.entries[size].per_fold_scores)
            sd = float(scores.std(ddof=1)) if scores.size > 1 else 0.0
            writer.writerow([size, _fmt(float(scores.mean())), _fmt(sd)])


def write_records(records, path) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([
                r.dataset, r.strategy, r.repetition, r.selected_size,
                r.eval_count, _fmt(r.accuracy), _fmt(r.kappa),
                _fmt(r.macro_recall), _fmt(r.g_mean),
                " ".join(str(i) for i in r.selected),
            ])


def read_records(path) -> list[RunRecord]:
    """Inverse of write_records for the compare command."""
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            records.append(RunRecord(
                dataset=row["dataset"],
                strategy=row["strategy"],
                repetition=int(row["repetition"]),
                selected_size=int(row["selected_size"]),
                selected=tuple(int(i) for i in row["selected_indices"].split()),
                wall_time=0.0,
                eval_count=int(row["eval_count"]),
                accuracy=float(row["accuracy"]),
                kappa=float(row["kappa"]),
                macro_recall=float(row["macro_recall"]),
                g_mean=float(row["g_mean"]),
            ))
    return records


def write_timings(records, path) -> None:
    """Wall-clock times; kept apart so the other artifacts stay deterministic."""
    with open(path, "w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["dataset", "strategy", "repetition", "wall_time_s"])
        for r in records:
            writer.writerow([r.dataset, r.strategy, r.repetition, _fmt(r.wall_time)])


def _mean_sd(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd


def write_summary(records, path) -> None:
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.dataset, r.strategy), []).append(r)
    with open(path, "w", newline="\n", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        header = ["dataset", "strategy", "runs", "size_mean", "size_sd",
                  "eval_count_total", "eval_count_mean"]
        for name in REPORT_METRICS:
            header += [f"{name}_mean", f"{name}_sd"]
        writer.writerow(header)
        for (dataset, strategy), group in groups.items():
            size_mean, size_sd = _mean_sd([r.selected_size for r in group])
            evals = [r.eval_count for r in group]
            row = [dataset, strategy, len(group), _fmt(size_mean), _fmt(size_sd),
                   sum(evals), _fmt(float(np.mean(evals)))]
            for name in REPORT_METRICS:
                mean, sd = _mean_sd([r.metric(name) for r in group])
                row += [_fmt(mean), _fmt(sd)]
            writer.writerow(row)


# ---------------------------------------------------------------------------
# significance report


def _block_table(records, metric_name: str, strategies) -> np.ndarray | None:
    """Strategies x blocks matrix; blocks are (dataset, repetition) pairs."""
    cells: dict[tuple[str, int], dict[str, float]] = {}
    for r in records:
        cells.setdefault((r.dataset, r.repetition), {})[r.strategy] = (
            float(r.selected_size) if metric_name == "selected_size"
            else r.metric(metric_name)
        )
    blocks = [key for key in sorted(cells) if len(cells[key]) == len(strategies)]
    if not blocks:
        return None
    return np.array([[cells[b][s] for b in blocks] for s in strategies])


def significance_report(records, alpha: float = 0.05) -> str:
    """Friedman ranks, Nemenyi critical distance, and pairwise Wilcoxon tests."""
    strategies = sorted({r.strategy for r in records})
    out = [f"strategies: {', '.join(strategies)}", f"alpha: {_fmt(alpha)}"]
    for metric_name in ("selected_size",) + REPORT_METRICS:
        lower_better = metric_name == "selected_size"
        out.append("")
        out.append(f"== {metric_name} ({'lower' if lower_better else 'higher'} is better)")
        table = _block_table(records, metric_name, strategies)
        if table is None:
            out.append("no complete blocks; skipped")
            continue
        ranked = -table if lower_better else table
        out.append(f"blocks: {table.shape[1]}")
        for i, strategy in enumerate(strategies):
            out.append(f"mean {strategy}: {_fmt(float(table[i].mean()))}")
        if len(strategies) >= 3 and table.shape[1] >= 2:
            avg_ranks, p_value = stats.friedman_test(ranked)
            cd = stats.nemenyi_cd(len(strategies), table.shape[1], alpha)
            out.append(
                "friedman ranks: "
                + ", ".join(f"{s}={_fmt(r)}" for s, r in zip(strategies, avg_ranks))
            )
            out.append(f"friedman p: {_fmt(p_value)}")
            out.append(f"nemenyi CD: {_fmt(cd)}")
            for i, j in stats.connected_pairs(avg_ranks, cd):
                out.append(f"not separable: {strategies[i]} ~ {strategies[j]}")
        else:
            out.append("friedman: needs >= 3 strategies and >= 2 blocks")
        for i in range(len(strategies)):
            for j in range(i + 1, len(strategies)):
                try:
                    p = stats.wilcoxon_signed_rank(ranked[i], ranked[j])
                    verdict = f"p={_fmt(p)}"
                except stats.InsufficientDataError as err:
                    verdict = f"insufficient data ({err})"
                out.append(f"wilcoxon {strategies[i]} vs {strategies[j]}: {verdict}")
    return "\n".join(out) + "\n"
