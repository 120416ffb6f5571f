"""Min-max [0,1] scaling calibrated on training rows only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-feature minimum and range recorded from the fitting rows."""

    mins: np.ndarray
    ranges: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        ranges = np.asarray(self.ranges, dtype=np.float64)
        if mins.shape != ranges.shape or mins.ndim != 1:
            raise DomainError("mins and ranges must be equal-length vectors")
        if np.any(ranges < 0):
            raise DomainError("ranges must be non-negative")
        mins.flags.writeable = False
        ranges.flags.writeable = False
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "ranges", ranges)

    @property
    def n_features(self) -> int:
        return self.mins.shape[0]


def fit_minmax(train_rows: np.ndarray) -> MinMaxScaler:
    """Record column-wise min and range of the training rows."""
    rows = np.asarray(train_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise DomainError("fit requires a non-empty 2-D matrix")
    mins = rows.min(axis=0)
    return MinMaxScaler(mins=mins, ranges=rows.max(axis=0) - mins)


def apply_minmax(scaler: MinMaxScaler, rows: np.ndarray) -> np.ndarray:
    """Map x to (x - min) / range per column.

    Constant columns (range 0) map to 0. Values outside the fitted range map
    outside [0, 1]; ordering information is kept, so no clipping.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != scaler.n_features:
        raise DomainError(
            f"expected {scaler.n_features} columns, got {rows.shape[1] if rows.ndim == 2 else '?'}"
        )
    safe = np.where(scaler.ranges > 0, scaler.ranges, 1.0)
    out = (rows - scaler.mins) / safe
    out[:, scaler.ranges == 0] = 0.0
    return out
