import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from subsectfs.core import DomainError
from subsectfs.preprocess import MinMaxScaler, apply_minmax, fit_minmax


class TestFit:
    def test_single_column(self):
        scaler = fit_minmax(np.array([[2.0], [4.0], [6.0]]))
        assert scaler.mins.tolist() == [2.0]
        assert scaler.ranges.tolist() == [4.0]

    def test_constant_feature(self):
        scaler = fit_minmax(np.array([[5.0], [5.0], [5.0]]))
        assert scaler.mins.tolist() == [5.0]
        assert scaler.ranges.tolist() == [0.0]

    def test_two_columns(self):
        scaler = fit_minmax(np.array([[0.0, 10.0], [1.0, 20.0]]))
        assert scaler.mins.tolist() == [0.0, 10.0]
        assert scaler.ranges.tolist() == [1.0, 10.0]

    def test_empty_matrix(self):
        with pytest.raises(DomainError):
            fit_minmax(np.empty((0, 3)))


class TestApply:
    scaler = MinMaxScaler(mins=np.array([2.0]), ranges=np.array([4.0]))

    def test_midpoint(self):
        assert apply_minmax(self.scaler, np.array([[4.0]]))[0, 0] == 0.5

    def test_no_clipping_above_range(self):
        assert apply_minmax(self.scaler, np.array([[8.0]]))[0, 0] == 1.5

    def test_constant_feature_maps_to_zero(self):
        constant = MinMaxScaler(mins=np.array([5.0]), ranges=np.array([0.0]))
        assert apply_minmax(constant, np.array([[7.0]]))[0, 0] == 0.0

    def test_column_mismatch(self):
        with pytest.raises(DomainError):
            apply_minmax(self.scaler, np.zeros((2, 3)))


@given(arrays(np.float64, (4, 3), elements=st.floats(-100, 100)))
def test_fitted_rows_map_into_unit_interval(rows):
    scaler = fit_minmax(rows)
    out = apply_minmax(scaler, rows)
    assert np.all(out >= 0.0) and np.all(out <= 1.0)
    assert np.all(np.isfinite(out))


def test_identity_scaler_is_identity():
    scaler = MinMaxScaler(mins=np.zeros(2), ranges=np.ones(2))
    rows = np.array([[0.2, 0.9], [1.4, -0.3]])
    assert np.array_equal(apply_minmax(scaler, rows), rows)
