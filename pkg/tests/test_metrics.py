import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from subsectfs.core import DomainError
from subsectfs.metrics import (
    ConfusionMatrix,
    MissingClassWarning,
    accuracy,
    confusion,
    g_mean,
    kappa,
    macro_recall,
)


def cm(rows):
    return ConfusionMatrix(np.array(rows))


class TestConfusion:
    def test_perfect_prediction(self):
        assert confusion([0, 1], [0, 1]).counts.tolist() == [[1, 0], [0, 1]]

    def test_total_confusion(self):
        assert confusion([0, 0], [1, 1]).counts.tolist() == [[0, 2], [0, 0]]

    def test_three_class_direct_count(self):
        result = confusion([0, 1, 1, 2], [0, 1, 2, 2])
        assert result.counts.tolist() == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            confusion([0, 1], [0])

    def test_out_of_range_label(self):
        with pytest.raises(DomainError):
            confusion([0, 2], [0, 1], n_classes=2)


class TestAccuracy:
    def test_perfect(self):
        assert accuracy(cm([[1, 0], [0, 1]])) == 1.0

    def test_zero(self):
        assert accuracy(cm([[0, 2], [0, 0]])) == 0.0

    def test_hand_count(self):
        assert accuracy(cm([[50, 10], [5, 35]])) == pytest.approx(0.85)

    def test_empty_matrix(self):
        with pytest.raises(DomainError):
            accuracy(cm([[0, 0], [0, 0]]))


class TestKappa:
    def test_perfect_agreement(self):
        assert kappa(cm([[1, 0], [0, 1]])) == 1.0

    def test_chance_level(self):
        assert kappa(cm([[25, 25], [25, 25]])) == 0.0

    def test_hand_computation(self):
        # p_o = 0.85, p_e = (60*55 + 40*45) / 100^2 = 0.51
        assert kappa(cm([[50, 10], [5, 35]])) == pytest.approx(0.34 / 0.49, abs=1e-12)

    def test_degenerate_pe_returns_zero(self):
        assert kappa(cm([[4, 0], [0, 0]])) == 0.0


class TestMacroRecall:
    def test_perfect(self):
        assert macro_recall(cm([[1, 0], [0, 1]])) == 1.0

    def test_hand_average(self):
        assert macro_recall(cm([[9, 1], [2, 8]])) == pytest.approx(0.85)

    def test_zero_and_one(self):
        assert macro_recall(cm([[0, 2], [0, 2]])) == pytest.approx(0.5)

    def test_empty_row_skipped_with_warning(self):
        with pytest.warns(MissingClassWarning):
            value = macro_recall(cm([[2, 0, 0], [0, 0, 0], [0, 0, 2]]))
        assert value == 1.0

    def test_all_rows_empty(self):
        with pytest.raises(DomainError):
            macro_recall(cm([[0, 0], [0, 0]]))


class TestGMean:
    def test_all_recalls_one(self):
        assert g_mean(cm([[1, 0], [0, 1]])) == 1.0

    def test_missed_class_annihilates(self):
        assert g_mean(cm([[0, 2], [0, 2]])) == 0.0

    def test_hand_geometric_mean(self):
        assert g_mean(cm([[9, 1], [2, 8]])) == pytest.approx(np.sqrt(0.72), abs=1e-9)


nonneg_matrices = arrays(
    np.int64, (3, 3), elements=st.integers(0, 30)
).filter(lambda counts: (counts.sum(axis=1) > 0).all())


@given(nonneg_matrices)
def test_gmean_never_exceeds_macro_recall(counts):
    matrix = cm(counts)
    assert g_mean(matrix) <= macro_recall(matrix) + 1e-12


@given(nonneg_matrices.filter(lambda counts: counts.sum() > 0))
def test_kappa_is_one_iff_diagonal(counts):
    matrix = cm(counts)
    value = kappa(matrix)
    off_diag = counts.sum() - np.trace(counts)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    p_e = float(rows @ cols) / counts.sum() ** 2
    if off_diag == 0 and p_e < 1.0:
        assert value == 1.0
    else:
        assert value < 1.0


@given(nonneg_matrices, st.permutations(range(3)))
def test_metrics_invariant_under_class_relabeling(counts, perm):
    perm = list(perm)
    permuted = counts[perm][:, perm]
    for metric in (accuracy, kappa, macro_recall, g_mean):
        assert metric(cm(permuted)) == pytest.approx(metric(cm(counts)), abs=1e-12)
