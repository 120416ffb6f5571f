import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subsectfs.core import (
    Dataset,
    DomainError,
    FeatureRanking,
    FoldAssignment,
    SearchTrace,
    SelectionResult,
    TraceEntry,
    select_top,
)


def entry(score, order):
    ranking = FeatureRanking(tuple(order))
    return TraceEntry((score,), (ranking,), ranking)


class TestSelectTop:
    def test_prefix_of_ranking(self):
        assert select_top(FeatureRanking((3, 1, 2)), 2) == {3, 1}

    def test_singleton_identity(self):
        assert select_top(FeatureRanking((0,)), 1) == {0}

    def test_full_length_prefix(self):
        assert select_top(FeatureRanking((5, 4, 3, 2, 1, 0)), 6) == {0, 1, 2, 3, 4, 5}

    def test_zero_is_domain_error(self):
        with pytest.raises(DomainError):
            select_top(FeatureRanking((0, 1)), 0)

    def test_overlong_is_domain_error(self):
        with pytest.raises(DomainError):
            select_top(FeatureRanking((0, 1)), 3)

    @given(st.permutations(range(12)), st.integers(1, 12), st.integers(1, 12))
    def test_nesting(self, order, a, b):
        ranking = FeatureRanking(tuple(order))
        small, large = sorted((a, b))
        assert select_top(ranking, small) <= select_top(ranking, large)


class TestDataset:
    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            Dataset(features=np.array([[0.0, np.nan]]), labels=np.array([0]),
                    n_classes=2)

    def test_rejects_length_mismatch(self):
        with pytest.raises(DomainError):
            Dataset(features=np.zeros((3, 2)), labels=np.array([0, 1]), n_classes=2)

    def test_rejects_single_class(self):
        with pytest.raises(DomainError):
            Dataset(features=np.zeros((3, 2)), labels=np.array([1, 1, 1]), n_classes=2)

    def test_subset_rows_keeps_class_count(self):
        ds = Dataset(features=np.arange(8.0).reshape(4, 2),
                     labels=np.array([0, 1, 2, 1]), n_classes=3)
        sub = ds.subset_rows(np.array([0, 1]))
        assert sub.n_classes == 3
        assert sub.n_examples == 2

    def test_features_immutable(self):
        ds = Dataset(features=np.zeros((2, 2)), labels=np.array([0, 1]), n_classes=2)
        with pytest.raises(ValueError):
            ds.features[0, 0] = 1.0


class TestFoldAssignment:
    def test_rejects_empty_fold(self):
        with pytest.raises(DomainError):
            FoldAssignment(fold_of=np.array([0, 0, 1]), k=3, seed=0)

    def test_train_validation_partition(self):
        folds = FoldAssignment(fold_of=np.array([0, 1, 0, 1]), k=2, seed=0)
        train, valid = folds.train_validation(0)
        assert sorted(np.concatenate([train, valid]).tolist()) == [0, 1, 2, 3]
        assert set(train).isdisjoint(valid)


class TestSearchTrace:
    def test_eval_count_is_distinct_sizes(self):
        trace = SearchTrace()
        trace.add(3, entry(0.5, [0, 1, 2]))
        trace.add(2, entry(0.7, [0, 1]))
        assert trace.eval_count == 2

    def test_duplicate_size_rejected(self):
        trace = SearchTrace()
        trace.add(2, entry(0.5, [0, 1]))
        with pytest.raises(DomainError):
            trace.add(2, entry(0.6, [0, 1]))

    def test_ranking_length_must_match_size(self):
        trace = SearchTrace()
        with pytest.raises(DomainError):
            trace.add(3, entry(0.5, [0, 1]))

    def test_best_size_tie_prefers_smaller(self):
        trace = SearchTrace()
        trace.add(5, entry(0.9, range(5)))
        trace.add(3, entry(0.9, range(3)))
        trace.add(4, entry(0.2, range(4)))
        assert trace.best_size() == 3

    def test_mean_recomputable_from_folds(self):
        ranking = FeatureRanking((0, 1))
        trace = SearchTrace()
        trace.add(2, TraceEntry((0.8, 0.9), (ranking, ranking), ranking))
        assert trace.mean_score(2) == pytest.approx(0.85)


class TestSelectionResult:
    def trace(self):
        trace = SearchTrace()
        trace.add(2, entry(0.9, [0, 1]))
        trace.add(1, entry(0.4, [0]))
        return trace

    def test_size_must_match_selection(self):
        with pytest.raises(DomainError):
            SelectionResult(selected=frozenset({0}), best_size=2,
                            trace=self.trace(), wall_time=0.0)

    def test_best_size_must_be_trace_best(self):
        with pytest.raises(DomainError):
            SelectionResult(selected=frozenset({0}), best_size=1,
                            trace=self.trace(), wall_time=0.0)

    def test_eval_count_delegates_to_trace(self):
        result = SelectionResult(selected=frozenset({0, 1}), best_size=2,
                                 trace=self.trace(), wall_time=0.1)
        assert result.eval_count == 2
