"""Shared synthetic-data builders for the test suite."""

import numpy as np
import pytest

from subsectfs.core import Dataset


def margin_dataset(n, m, informative, seed, margin=1.0, hi=8.0, lo=3.0,
                   name="margin") -> Dataset:
    """Linearly separable data with a margin band removed near the boundary.

    The first ``informative`` features carry distinct weights; the rest are
    uniform noise. The margin makes validation scores saturate once all
    informative features are present, giving a rise-then-plateau score curve.
    """
    rng = np.random.default_rng(seed)
    weights = np.linspace(hi, lo, informative)
    rows = []
    while len(rows) < n:
        X = rng.uniform(0, 1, size=(4 * n, m))
        score = (X[:, :informative] - 0.5) @ weights
        keep = np.abs(score) > margin
        rows.extend(X[keep][: n - len(rows)])
    X = np.asarray(rows[:n])
    y = ((X[:, :informative] - 0.5) @ weights > 0).astype(int)
    return Dataset(features=X, labels=y, n_classes=2, name=name)


def separable_dataset(n=200, seed=0, gap=0.02, name="separable") -> Dataset:
    """Two uniform features; the class is 1 iff the first exceeds 0.5.

    A small gap is left around the threshold so the classes are separable
    with a margin rather than by an infinitely sharp boundary.
    """
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < n:
        X = rng.uniform(0, 1, size=(2 * n, 2))
        keep = np.abs(X[:, 0] - 0.5) > gap
        rows.extend(X[keep][: n - len(rows)])
    X = np.asarray(rows)
    y = (X[:, 0] > 0.5).astype(int)
    return Dataset(features=X, labels=y, n_classes=2, name=name)


def informative_plus_noise(n, n_noise, seed, name="inf-noise") -> Dataset:
    """Feature 0 determines the class; remaining features are uniform noise."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 1, size=(n, 1 + n_noise))
    y = (X[:, 0] > 0.5).astype(int)
    return Dataset(features=X, labels=y, n_classes=2, name=name)


def unimodal_values(m, peak, rng) -> dict[int, float]:
    """Strictly increasing to ``peak`` then strictly decreasing, distinct values."""
    up = np.sort(rng.uniform(0.0, 1.0, size=peak))
    down = np.sort(rng.uniform(0.0, 1.0, size=m - peak))[::-1] * up[-1] * 0.999
    arr = np.concatenate([up, down])
    return {size: float(arr[size - 1]) for size in range(1, m + 1)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
