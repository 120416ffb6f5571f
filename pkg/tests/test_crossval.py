
import numpy as np
import pytest

from subsectfs.core import DomainError, FeatureRanking
from subsectfs.crossval import (
    SmallClassWarning,
    aggregate_ranking,
    cv_evaluate,
    stratified_folds,
    stratified_folds_canonical,
)
from subsectfs.rankers import LogisticParams, RankerConfig
from conftest import margin_dataset, separable_dataset

RANKER = RankerConfig(kind="logistic", seed=0,
                      logistic=LogisticParams(max_epochs=150, learning_rate=1.0))


class TestStratifiedFolds:
    def test_round_robin_class_counts(self):
        labels = np.array([0] * 7 + [1] * 3)
        with pytest.warns(SmallClassWarning):
            folds = stratified_folds(labels, k=5, seed=1)
        class0 = [int(np.sum(folds.fold_of[labels == 0] == f)) for f in range(5)]
        class1 = [int(np.sum(folds.fold_of[labels == 1] == f)) for f in range(5)]
        assert sorted(class0) == [1, 1, 1, 2, 2]
        assert sorted(class1) == [0, 0, 1, 1, 1]

    def test_divisible_case_exact(self):
        labels = np.array([0] * 10 + [1] * 10)
        folds = stratified_folds(labels, k=5, seed=3)
        for fold in range(5):
            members = folds.fold_of == fold
            assert np.sum(labels[members] == 0) == 2
            assert np.sum(labels[members] == 1) == 2

    def test_deterministic(self):
        labels = np.array([0, 1] * 8)
        a = stratified_folds(labels, k=4, seed=9)
        b = stratified_folds(labels, k=4, seed=9)
        assert np.array_equal(a.fold_of, b.fold_of)

    def test_more_folds_than_examples(self):
        with pytest.raises(DomainError):
            stratified_folds(np.array([0, 1, 0]), k=4, seed=0)

    def test_folds_partition_examples(self):
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 3, size=37)
        folds = stratified_folds(labels, k=5, seed=5)
        assert folds.fold_of.shape == labels.shape
        assert set(folds.fold_of.tolist()) == set(range(5))


class TestCvEvaluate:
    def test_separating_feature_scores_one(self):
        ds = margin_dataset(150, 5, 1, seed=0, margin=0.25, hi=6.0, lo=6.0)
        folds = stratified_folds(ds.labels, k=5, seed=0)
        scores, _ = cv_evaluate({0, 2}, ds, folds, RANKER)
        assert scores == [1.0] * 5

    def test_shape_contract(self):
        ds = separable_dataset(n=60, seed=1)
        folds = stratified_folds(ds.labels, k=5, seed=0)
        scores, rankings = cv_evaluate({0, 1}, ds, folds, RANKER)
        assert len(scores) == 5 and len(rankings) == 5
        assert all(len(r) == 2 for r in rankings)

    def test_deterministic(self):
        ds = separable_dataset(n=60, seed=4)
        folds = stratified_folds(ds.labels, k=3, seed=2)
        first = cv_evaluate({0, 1}, ds, folds, RANKER)
        second = cv_evaluate({0, 1}, ds, folds, RANKER)
        assert first == second

    def test_empty_subset_rejected(self):
        ds = separable_dataset(n=40, seed=0)
        folds = stratified_folds(ds.labels, k=2, seed=0)
        with pytest.raises(DomainError):
            cv_evaluate(set(), ds, folds, RANKER)

    def test_mean_score_invariant_under_row_permutation(self):
        ds = separable_dataset(n=80, seed=6)
        rng = np.random.default_rng(0)
        perm = rng.permutation(ds.n_examples)
        shuffled = ds.subset_rows(perm, name="shuffled")

        def mean_cv(dataset):
            folds = stratified_folds_canonical(dataset, 5, seed=13)
            scores, _ = cv_evaluate({0, 1}, dataset, folds, RANKER)
            return np.mean(scores)

        assert mean_cv(ds) == pytest.approx(mean_cv(shuffled), abs=0.0)


class TestAggregateRanking:
    def test_unanimity(self):
        ranking = FeatureRanking((2, 0, 1))
        assert aggregate_ranking([ranking] * 5).order == (2, 0, 1)

    def test_mean_rank_tie_breaks_by_index(self):
        merged = aggregate_ranking([FeatureRanking((0, 1)), FeatureRanking((1, 0))])
        assert merged.order == (0, 1)

    def test_mean_rank_ordering(self):
        merged = aggregate_ranking([
            FeatureRanking((0, 1, 2)),
            FeatureRanking((0, 2, 1)),
            FeatureRanking((2, 0, 1)),
        ])
        assert merged.order == (0, 2, 1)

    def test_mismatched_index_sets(self):
        with pytest.raises(DomainError):
            aggregate_ranking([FeatureRanking((0, 1)), FeatureRanking((0, 2))])
