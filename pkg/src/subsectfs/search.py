"""Elimination strategies: Fibonacci search, k-subsecting search, fixed steps.

All three strategies walk subset sizes downward from the full feature count,
re-ranking with cross-validation at each probed size and truncating the
ranking of a previously evaluated, larger size to form the next subset. They
differ only in which sizes they probe:

* ``frfe`` places probes by Fibonacci line search, so the number of
  cross-validated sizes grows logarithmically with the feature count.
* ``ksrfe`` sweeps k equally spaced sizes per pass and recurses on the
  interval around the best sweep point until the step reaches 1.
* ``rfe_fixed_steps`` probes a fixed uniform grid of sizes (the classic
  large-step elimination baseline).

The probing logic is written against a size evaluator, so the same engines
run on real datasets (``CvEvaluator``) and on plain score functions
(``FunctionEvaluator``), the latter backing ``fibonacci_search`` and
``ksubsect_search`` as generic discrete line searches.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import crossval, preprocess, rankers
from .core import (
    Dataset,
    DomainError,
    FeatureRanking,
    SearchTrace,
    SelectionResult,
    TraceEntry,
    select_top,
)

STRATEGIES = ("frfe", "ksrfe", "rfe_fixed")


@dataclass(frozen=True)
class SearchConfig:
    """Strategy choice plus the cross-validation and ranker setup."""

    strategy: str
    ranker: rankers.RankerConfig
    k: int | None = None  # ksrfe only
    n_steps: int | None = None  # rfe_fixed only
    cv_k: int = 5
    seed: int = 0
    metric: str = "accuracy"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "ksrfe" and (self.k is None or self.k < 2):
            raise DomainError("ksrfe requires k >= 2")
        if self.strategy == "rfe_fixed" and (self.n_steps is None or self.n_steps < 2):
            raise DomainError("rfe_fixed requires n_steps >= 2")
        if self.cv_k < 2:
            raise DomainError("cv_k must be >= 2")


def fibonacci_upto(m: int) -> list[int]:
    """Fibonacci numbers 1, 1, 2, ... ending at the first value > m."""
    if m < 1:
        raise DomainError("m must be >= 1")
    fibs = [1, 1]
    while fibs[-1] <= m:
        fibs.append(fibs[-1] + fibs[-2])
    return fibs


class CvEvaluator:
    """Scores subset sizes by stratified CV, caching results in a SearchTrace.

    A probe at ``size`` truncates the aggregated ranking cached for
    ``anchor`` (a previously evaluated, larger size); ``anchor=None`` means
    the full feature set and is only valid for the full size.
    """

    def __init__(self, dataset: Dataset, folds, ranker: rankers.RankerConfig,
                 metric: str = "accuracy"):
        self.dataset = dataset
        self.folds = folds
        self.ranker = ranker
        self.metric = metric
        self.trace = SearchTrace()

    def evaluate(self, size: int, anchor: int | None = None) -> float:
        if size in self.trace:
            return self.trace.mean_score(size)
        if anchor is None:
            if size != self.dataset.n_features:
                raise DomainError("only the full size may be evaluated without an anchor")
            subset = set(range(size))
        else:
            subset = select_top(self.trace.ranking(anchor), size)
        scores, fold_rankings = crossval.cv_evaluate(
            subset, self.dataset, self.folds, self.ranker, self.metric
        )
        aggregated = crossval.aggregate_ranking(fold_rankings)
        self.trace.add(
            size, TraceEntry(tuple(scores), tuple(fold_rankings), aggregated)
        )
        return self.trace.mean_score(size)


class FunctionEvaluator:
    """Scores sizes with a plain function under a fixed feature order.

    Stands in for cross-validation when studying the line searches on
    synthetic score curves; the implied ranking never changes, which is
    exactly the stable-ranking premise of the strategies.
    """

    def __init__(self, score, m: int, order=None):
        self.score = score
        self.order = tuple(order) if order is not None else tuple(range(m))
        self.trace = SearchTrace()

    def evaluate(self, size: int, anchor: int | None = None) -> float:
        if size in self.trace:
            return self.trace.mean_score(size)
        value = float(self.score(size))
        ranking = FeatureRanking(self.order[:size])
        self.trace.add(size, TraceEntry((value,), (ranking,), ranking))
        return value


# ---------------------------------------------------------------------------
# engines


def run_fibonacci(evaluator, lower: int, upper: int, on_interval=None) -> int:
    """Fibonacci search for the best size in [lower, upper].

    Probe offsets follow consecutive Fibonacci numbers; each loop iteration
    discards the interval end with the worse probe (ties shrink toward fewer
    features). The interval is padded on the right to an exact Fibonacci
    width; padded positions score -inf and are never truly evaluated, which
    keeps the probe arithmetic aligned when the size range is not itself a
    Fibonacci number. Cached sizes are never re-evaluated, and both final
    candidates are scored, so a strictly unimodal score curve yields its
    exact argmax.

    ``on_interval``, when given, observes (lower, upper) after every
    iteration, e.g. to plot or check the shrinking search interval.
    """
    if lower >= upper:
        raise DomainError("need lower < upper")
    if lower < 1:
        raise DomainError("sizes start at 1")
    real_upper = upper
    fibs = fibonacci_upto(upper - lower + 1)
    n = len(fibs) - 1
    evaluator.evaluate(upper, None)
    trace = evaluator.trace

    def probe(position: int, interval_upper: int) -> float:
        if position > real_upper:
            return float("-inf")
        # endpoints that were never probed fall back to the full-size ranking
        anchor = interval_upper if interval_upper <= real_upper else real_upper
        return evaluator.evaluate(position, anchor)

    upper = lower + fibs[n]  # exact-width (possibly padded) interval
    x1 = lower + fibs[n - 2]
    x2 = lower + fibs[n - 1]
    y1 = probe(x1, upper)
    y2 = probe(x2, upper)
    while upper - lower > 1:
        n -= 1
        if y1 < y2:
            lower = x1
            x1, y1 = x2, y2
            if upper - lower > 1:
                x2 = lower + fibs[n - 1]
                y2 = probe(x2, upper)
        else:
            upper = x2
            x2, y2 = x1, y1
            if upper - lower > 1:
                x1 = lower + fibs[n - 2]
                y1 = probe(x1, upper)
        if on_interval is not None:
            on_interval(lower, min(upper, real_upper))
    for candidate in (lower, min(upper, real_upper)):
        if candidate not in trace:
            anchor = min(s for s in trace.sizes() if s > candidate)
            evaluator.evaluate(candidate, anchor)
    return trace.best_size()


def run_ksubsect(evaluator, lower: int, upper: int, k: int) -> int:
    """k-subsecting search for the best size in [lower, upper].

    Each pass sweeps from the interval's upper end down to its lower end in
    strides of ``step``, then recenters the interval on the best point of
    the sweep (the sweep's starting upper included) and shrinks the step
    until it reaches 0.
    """
    if lower >= upper:
        raise DomainError("need lower < upper")
    if lower < 1:
        raise DomainError("sizes start at 1")
    if k < 2:
        raise DomainError("k must be >= 2")
    floor_size, ceil_size = lower, upper
    step = (upper + lower) // k
    if step == 0:
        step = 1
    evaluator.evaluate(upper, None)
    while step > 0:
        if upper not in evaluator.trace:
            # recentering can start a sweep on a size no pass has probed yet
            anchor = min(s for s in evaluator.trace.sizes() if s > upper)
            evaluator.evaluate(upper, anchor)
        sweep = [upper]
        prev_mid = upper
        mid = upper - step
        while mid > lower - step:
            mid = max(mid, lower)
            evaluator.evaluate(mid, prev_mid)
            sweep.append(mid)
            prev_mid = mid
            mid = prev_mid - step
        best = min(sweep, key=lambda s: (-evaluator.trace.mean_score(s), s))
        lower = best - step if best - step > floor_size else floor_size
        upper = best + step if best + step < ceil_size else ceil_size
        if step > 1 and (upper - lower) // k == 0:
            step = 1
        else:
            step = min((upper - lower) // k, step - 1)
    return evaluator.trace.best_size()


def run_fixed_chain(evaluator, sizes) -> int:
    """Evaluate a descending chain of sizes, each truncated from the previous."""
    prev = None
    for size in sizes:
        evaluator.evaluate(size, prev)
        prev = size
    return evaluator.trace.best_size()


def fixed_step_sizes(m: int, n_steps: int) -> list[int]:
    """Uniformly spaced probe sizes from m toward 1.

    The stride is m/n_steps rounded half up; if the grid does not land on a
    single feature, one additional size of 1 is appended.
    """
    if n_steps < 2:
        raise DomainError("n_steps must be >= 2")
    if m < 2:
        raise DomainError("need at least 2 features")
    step = max(1, math.floor(m / n_steps + 0.5))
    sizes = []
    size = m
    while size >= 1 and len(sizes) < n_steps:
        sizes.append(size)
        size -= step
    if sizes[-1] != 1:
        sizes.append(1)
    return sizes


# ---------------------------------------------------------------------------
# generic line searches over plain score functions


def fibonacci_search(score, lower: int, upper: int) -> int:
    """Argmax of a unimodal integer score function via Fibonacci search."""
    evaluator = FunctionEvaluator(score, upper)
    return run_fibonacci(evaluator, lower, upper)


def ksubsect_search(score, lower: int, upper: int, k: int) -> int:
    """Argmax of a unimodal integer score function via k-subsecting search."""
    evaluator = FunctionEvaluator(score, upper)
    return run_ksubsect(evaluator, lower, upper, k)


# ---------------------------------------------------------------------------
# dataset-level strategies


def _make_evaluator(dataset: Dataset, config: SearchConfig) -> CvEvaluator:
    if dataset.n_features < 2:
        raise DomainError("need at least 2 features to search over")
    folds = crossval.stratified_folds_canonical(dataset, config.cv_k, config.seed)
    return CvEvaluator(dataset, folds, config.ranker, config.metric)


def _finish(dataset, config, evaluator, best, started) -> SelectionResult:
    selected = final_selection(dataset, evaluator.trace, best, config.ranker)
    return SelectionResult(
        selected=frozenset(selected),
        best_size=best,
        trace=evaluator.trace,
        wall_time=time.perf_counter() - started,
    )


def frfe(dataset: Dataset, config: SearchConfig) -> SelectionResult:
    """Feature selection with Fibonacci line search over subset sizes."""
    started = time.perf_counter()
    evaluator = _make_evaluator(dataset, config)
    best = run_fibonacci(evaluator, 1, dataset.n_features)
    return _finish(dataset, config, evaluator, best, started)


def ksrfe(dataset: Dataset, config: SearchConfig) -> SelectionResult:
    """Feature selection with k-subsecting search over subset sizes."""
    started = time.perf_counter()
    evaluator = _make_evaluator(dataset, config)
    best = run_ksubsect(evaluator, 1, dataset.n_features, config.k)
    return _finish(dataset, config, evaluator, best, started)


def rfe_fixed_steps(dataset: Dataset, config: SearchConfig) -> SelectionResult:
    """Classic recursive elimination over a fixed uniform grid of sizes."""
    started = time.perf_counter()
    sizes = fixed_step_sizes(dataset.n_features, config.n_steps)
    evaluator = _make_evaluator(dataset, config)
    best = run_fixed_chain(evaluator, sizes)
    return _finish(dataset, config, evaluator, best, started)


def run_strategy(dataset: Dataset, config: SearchConfig) -> SelectionResult:
    if config.strategy == "frfe":
        return frfe(dataset, config)
    if config.strategy == "ksrfe":
        return ksrfe(dataset, config)
    return rfe_fixed_steps(dataset, config)


def final_selection(dataset: Dataset, trace: SearchTrace, best: int,
                    ranker: rankers.RankerConfig) -> set[int]:
    """Re-derive the selected subset without CV by walking the traced sizes.

    The ranker is retrained on the whole dataset (min-max scaled on all
    rows) at each traced size from the full count down to ``best``, each
    time truncating the fresh ranking to the next size on the path.
    """
    if best not in trace:
        raise DomainError(f"best size {best} was never traced")
    m = dataset.n_features
    scaler = preprocess.fit_minmax(dataset.features)
    X = preprocess.apply_minmax(scaler, dataset.features)
    path = [m] + sorted((s for s in trace.sizes() if best <= s < m), reverse=True)
    subset = list(range(m))
    for position, size in enumerate(path):
        columns = sorted(subset)
        model = rankers.train(
            ranker,
            X[:, columns],
            dataset.labels,
            feature_subset=columns,
            n_classes=dataset.n_classes,
        )
        if position + 1 < len(path):
            subset = select_top(model.rank_features(), path[position + 1])
    return set(subset)
