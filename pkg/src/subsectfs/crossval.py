"""Stratified k-fold cross-validation of a feature subset.

One fold evaluation scales features with min-max calibrated on the training
partition, trains the wrapped classifier, scores the validation partition,
and records the fold's feature ranking. Fold results are ordered by fold
index and independent of worker scheduling.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import metrics, preprocess, rankers
from .core import Dataset, DomainError, FeatureRanking, FoldAssignment
from .parallel import ordered_map


class SmallClassWarning(UserWarning):
    """A class has fewer examples than folds and is absent from some folds."""


def stratified_folds(labels, k: int, seed: int) -> FoldAssignment:
    """Deal each class's examples round-robin to k folds after a seeded shuffle.

    Within each class, examples are taken in a canonical order, shuffled by
    the seed, and dealt to consecutive folds; the fold cursor carries over
    between classes so folds stay non-empty whenever k <= #examples.
    Per-class fold counts differ by at most 1.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise DomainError("fold count must be >= 2")
    if k > labels.shape[0]:
        raise DomainError(f"cannot make {k} folds from {labels.shape[0]} examples")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    fold_of = np.empty(labels.shape[0], dtype=np.int64)
    cursor = 0
    small = []
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            small.append(int(cls))
        members = members[rng.permutation(members.size)]
        for j, idx in enumerate(members):
            fold_of[idx] = (cursor + j) % k
        cursor = (cursor + members.size) % k
    if small:
        warnings.warn(
            f"class(es) {small} have fewer than {k} examples and are absent "
            "from some folds",
            SmallClassWarning,
            stacklevel=2,
        )
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed)


def canonical_row_order(dataset: Dataset) -> np.ndarray:
    """Example indices sorted by (class, lexicographic feature content).

    Shuffling this order instead of raw row positions makes fold contents,
    and hence CV scores, invariant under permutations of the input rows.
    """
    keys = [dataset.features[:, j] for j in range(dataset.n_features - 1, -1, -1)]
    keys.append(dataset.labels)
    return np.lexsort(keys)


def stratified_folds_canonical(dataset: Dataset, k: int, seed: int) -> FoldAssignment:
    """stratified_folds applied in canonical row order (see canonical_row_order)."""
    order = canonical_row_order(dataset)
    canon = stratified_folds(dataset.labels[order], k, seed)
    fold_of = np.empty(dataset.n_examples, dtype=np.int64)
    fold_of[order] = canon.fold_of
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed)


def cv_evaluate(
    subset,
    dataset: Dataset,
    folds: FoldAssignment,
    ranker: rankers.RankerConfig,
    metric: str = "accuracy",
) -> tuple[list[float], list[FeatureRanking]]:
    """Per-fold validation scores and per-fold rankings for a feature subset."""
    columns = np.asarray(sorted(subset), dtype=np.int64)
    if columns.size == 0:
        raise DomainError("subset must be non-empty")
    if columns.min() < 0 or columns.max() >= dataset.n_features:
        raise DomainError("subset indices outside the dataset's features")
    if folds.fold_of.shape[0] != dataset.n_examples:
        raise DomainError("fold assignment does not match the dataset")
    score_fn = metrics.metric_function(metric)
    X_all = dataset.features[:, columns]
    subset_ids = tuple(int(c) for c in columns)

    def run_fold(fold: int):
        train_idx, valid_idx = folds.train_validation(fold)
        try:
            scaler = preprocess.fit_minmax(X_all[train_idx])
            X_train = preprocess.apply_minmax(scaler, X_all[train_idx])
            X_valid = preprocess.apply_minmax(scaler, X_all[valid_idx])
            model = rankers.train(
                ranker,
                X_train,
                dataset.labels[train_idx],
                feature_subset=subset_ids,
                n_classes=dataset.n_classes,
            )
            predicted = model.predict(X_valid)
            cm = metrics.confusion(dataset.labels[valid_idx], predicted,
                                   n_classes=dataset.n_classes)
            return float(score_fn(cm)), model.rank_features()
        except DomainError as err:
            raise DomainError(f"fold {fold}: {err}") from err

    results = ordered_map(run_fold, range(folds.k))
    return [score for score, _ in results], [ranking for _, ranking in results]


def aggregate_ranking(fold_rankings) -> FeatureRanking:
    """Merge per-fold rankings by ascending mean rank position; ties by index."""
    fold_rankings = list(fold_rankings)
    if not fold_rankings:
        raise DomainError("no rankings to aggregate")
    index_set = set(fold_rankings[0].order)
    positions = {idx: 0.0 for idx in index_set}
    for ranking in fold_rankings:
        if set(ranking.order) != index_set:
            raise DomainError("fold rankings cover different feature sets")
        for pos, idx in enumerate(ranking.order):
            positions[idx] += pos
    order = sorted(index_set, key=lambda idx: (positions[idx], idx))
    return FeatureRanking(tuple(order))
