"""Shared domain types and the ranking-truncation primitive."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Raised when an operation is called outside its contract."""


class InsufficientDataError(DomainError):
    """Raised when a statistical test has too few usable observations."""


@dataclass(frozen=True)
class Dataset:
    """An examples x features matrix with integer class labels.

    Labels are contiguous integers 0..n_classes-1; original label values
    (e.g. class name strings from a CSV) live in ``label_names`` with the
    normalized id as index. Row subsets taken during cross-validation may
    miss a class, so ``n_classes`` is carried explicitly instead of being
    re-derived from the labels present.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    feature_names: tuple[str, ...] | None = None
    label_names: tuple[str, ...] | None = None
    name: str = "dataset"

    def __post_init__(self):
        features = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise DomainError("features must be a 2-D matrix")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise DomainError(
                f"labels length {labels.shape} does not match {features.shape[0]} rows"
            )
        if not np.all(np.isfinite(features)):
            raise DomainError("features contain NaN or Inf")
        if labels.size == 0:
            raise DomainError("dataset has no examples")
        if labels.min() < 0 or labels.max() >= self.n_classes:
            raise DomainError("labels outside [0, n_classes)")
        if len(np.unique(labels)) < 2:
            raise DomainError("dataset must contain at least 2 distinct classes")
        if self.feature_names is not None and len(self.feature_names) != features.shape[1]:
            raise DomainError("feature_names length does not match feature count")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n_examples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset_rows(self, rows: np.ndarray, name: str | None = None) -> "Dataset":
        """Dataset restricted to the given example indices (classes kept)."""
        return Dataset(
            features=self.features[rows],
            labels=self.labels[rows],
            n_classes=self.n_classes,
            feature_names=self.feature_names,
            label_names=self.label_names,
            name=name or self.name,
        )


@dataclass(frozen=True)
class FeatureRanking:
    """Distinct feature indices ordered best first."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if len(set(order)) != len(order):
            raise DomainError("ranking contains duplicate feature indices")
        if order and min(order) < 0:
            raise DomainError("ranking contains negative feature indices")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)


def select_top(ranking: FeatureRanking, n: int) -> set[int]:
    """First ``n`` indices of the ranking, as a set."""
    if n <= 0:
        raise DomainError(f"cannot select {n} features")
    if n > len(ranking.order):
        raise DomainError(f"cannot select {n} from a ranking of {len(ranking.order)}")
    return set(ranking.order[:n])


@dataclass(frozen=True)
class FoldAssignment:
    """Example -> fold map for stratified k-fold cross-validation."""

    fold_of: np.ndarray
    k: int
    seed: int

    def __post_init__(self):
        fold_of = np.asarray(self.fold_of, dtype=np.int64)
        if self.k < 2:
            raise DomainError("fold count must be >= 2")
        if fold_of.min() < 0 or fold_of.max() >= self.k:
            raise DomainError("fold indices outside [0, k)")
        counts = np.bincount(fold_of, minlength=self.k)
        if counts.min() == 0:
            raise DomainError("every fold must be non-empty")
        fold_of.flags.writeable = False
        object.__setattr__(self, "fold_of", fold_of)

    def train_validation(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """Row indices of the training and validation partitions of a fold."""
        mask = self.fold_of == fold
        return np.flatnonzero(~mask), np.flatnonzero(mask)


@dataclass(frozen=True)
class TraceEntry:
    """Cross-validation outcome cached for one subset size."""

    per_fold_scores: tuple[float, ...]
    fold_rankings: tuple[FeatureRanking, ...]
    aggregated_ranking: FeatureRanking

    @property
    def mean_score(self) -> float:
        return float(sum(self.per_fold_scores) / len(self.per_fold_scores))


class SearchTrace:
    """Cache of (subset size -> scores and rankings) written by one search run.

    A size may be recorded only once; search strategies must reuse the cached
    entry rather than re-evaluating.
    """

    def __init__(self):
        self.entries: dict[int, TraceEntry] = {}

    @property
    def eval_count(self) -> int:
        return len(self.entries)

    def __contains__(self, size: int) -> bool:
        return size in self.entries

    def add(self, size: int, entry: TraceEntry) -> None:
        if size in self.entries:
            raise DomainError(f"size {size} already evaluated in this run")
        if len(entry.aggregated_ranking) != size:
            raise DomainError("aggregated ranking length must equal the subset size")
        self.entries[size] = entry

    def mean_score(self, size: int) -> float:
        return self.entries[size].mean_score

    def ranking(self, size: int) -> FeatureRanking:
        return self.entries[size].aggregated_ranking

    def sizes(self) -> list[int]:
        return sorted(self.entries)

    def best_size(self) -> int:
        """Traced size with the highest mean score; ties go to the smallest."""
        if not self.entries:
            raise DomainError("trace is empty")
        return min(self.entries, key=lambda s: (-self.entries[s].mean_score, s))


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one feature-selection run."""

    selected: frozenset[int]
    best_size: int
    trace: SearchTrace = field(repr=False)
    wall_time: float

    def __post_init__(self):
        if len(self.selected) != self.best_size:
            raise DomainError("selected set size must equal best_size")
        if self.best_size != self.trace.best_size():
            raise DomainError("best_size must be the best traced size")

    @property
    def eval_count(self) -> int:
        return self.trace.eval_count
