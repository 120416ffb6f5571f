"""Confusion-matrix evaluation measures: accuracy, kappa, macro recall, G-mean."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DomainError


class MissingClassWarning(UserWarning):
    """A true class had no examples in the evaluated fold and was skipped."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """C x C count matrix, rows = true class, columns = predicted class."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DomainError("confusion matrix must be square")
        if counts.min() < 0:
            raise DomainError("confusion matrix entries must be non-negative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]


def confusion(y_true, y_pred, n_classes: int | None = None) -> ConfusionMatrix:
    """Count matrix with counts[i][j] = #{t : y_true[t]=i and y_pred[t]=j}."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise DomainError("y_true and y_pred must be equal-length vectors")
    if y_true.size == 0:
        raise DomainError("cannot build a confusion matrix from zero examples")
    if y_true.min() < 0 or y_pred.min() < 0:
        raise DomainError("labels must be non-negative")
    if n_classes is None:
        n_classes = int(max(y_true.max(), y_pred.max())) + 1
    elif y_true.max() >= n_classes or y_pred.max() >= n_classes:
        raise DomainError(f"label outside [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def accuracy(cm: ConfusionMatrix) -> float:
    """Fraction of examples on the diagonal."""
    if cm.total == 0:
        raise DomainError("empty confusion matrix")
    return float(np.trace(cm.counts) / cm.total)


def kappa(cm: ConfusionMatrix) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e); 0 when p_e = 1."""
    total = cm.total
    if total == 0:
        raise DomainError("empty confusion matrix")
    p_o = np.trace(cm.counts) / total
    rows = cm.counts.sum(axis=1)
    cols = cm.counts.sum(axis=0)
    p_e = float(rows @ cols) / (total * total)
    if p_e == 1.0:
        return 0.0
    return float((p_o - p_e) / (1.0 - p_e))


def _per_class_recalls(cm: ConfusionMatrix) -> np.ndarray:
    """Recalls of classes present in the fold; absent classes are skipped."""
    rows = cm.counts.sum(axis=1)
    present = rows > 0
    if not present.any():
        raise DomainError("confusion matrix has no true examples in any class")
    skipped = int((~present).sum())
    if skipped:
        warnings.warn(
            f"{skipped} class(es) absent from the validation fold, "
            "excluded from the recall average",
            MissingClassWarning,
            stacklevel=3,
        )
    diag = np.diag(cm.counts)
    return diag[present] / rows[present]


def macro_recall(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class recalls over classes present."""
    return float(np.mean(_per_class_recalls(cm)))


def g_mean(cm: ConfusionMatrix) -> float:
    """Geometric mean of per-class recalls; 0 if any present class is missed."""
    recalls = _per_class_recalls(cm)
    if np.any(recalls == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(recalls))))


METRICS = {
    "accuracy": accuracy,
    "kappa": kappa,
    "macro_recall": macro_recall,
    "g_mean": g_mean,
}


def metric_function(metric_id: str):
    """Resolve a metric id to its ConfusionMatrix -> float function."""
    try:
        return METRICS[metric_id]
    except KeyError:
        raise DomainError(f"unknown metric {metric_id!r}") from None
