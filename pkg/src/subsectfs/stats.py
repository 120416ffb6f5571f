"""Nonparametric comparison tests: Friedman, Nemenyi CD, Wilcoxon signed rank."""

from __future__ import annotations

import numpy as np
from scipy import stats as spstats

from .core import DomainError, InsufficientDataError

# Critical values of the studentized range statistic at infinite degrees of
# freedom, divided by sqrt(2); indexed by the number of compared algorithms.
_Q_TABLE = {
    0.05: {
        2: 1.960, 3: 2.344, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.948,
        8: 3.031, 9: 3.102, 10: 3.164, 11: 3.219, 12: 3.268, 13: 3.313,
        14: 3.354, 15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489, 19: 3.517,
        20: 3.544,
    },
    0.10: {
        2: 1.645, 3: 2.052, 4: 2.291, 5: 2.460, 6: 2.589, 7: 2.693,
        8: 2.780, 9: 2.855, 10: 2.920, 11: 2.978, 12: 3.030, 13: 3.077,
        14: 3.120, 15: 3.159, 16: 3.196, 17: 3.230, 18: 3.261, 19: 3.291,
        20: 3.319,
    },
}


def _friedman_ranks(scores: np.ndarray) -> np.ndarray:
    """Per-dataset ranks of the algorithms, 1 = highest score, ties averaged."""
    ranks = np.empty_like(scores, dtype=np.float64)
    for d in range(scores.shape[1]):
        ranks[:, d] = spstats.rankdata(-scores[:, d], method="average")
    return ranks


def _friedman_chi2(avg_ranks: np.ndarray, n_datasets: int) -> float:
    A = avg_ranks.shape[0]
    return float(
        12.0 * n_datasets / (A * (A + 1))
        * (np.sum(avg_ranks**2) - A * (A + 1) ** 2 / 4.0)
    )


def friedman_test(scores) -> tuple[np.ndarray, float]:
    """Average ranks and Iman-Davenport p-value for an A x D score matrix.

    Rows are algorithms, columns are datasets; higher scores rank better
    (rank 1 is best). The p-value comes from the F-distribution form of the
    Friedman statistic.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise DomainError("scores must be a 2-D algorithms x datasets matrix")
    A, D = scores.shape
    if A < 3 or D < 2:
        raise DomainError(f"need >= 3 algorithms and >= 2 datasets, got {A} x {D}")
    avg_ranks = _friedman_ranks(scores).mean(axis=1)
    chi2 = _friedman_chi2(avg_ranks, D)
    denominator = D * (A - 1) - chi2
    if denominator <= 0:
        return avg_ranks, 0.0
    f_stat = (D - 1) * chi2 / denominator
    p_value = float(spstats.f.sf(f_stat, A - 1, (A - 1) * (D - 1)))
    return avg_ranks, p_value


def nemenyi_cd(A: int, D: int, alpha: float = 0.05) -> float:
    """Critical distance q_alpha(A) * sqrt(A(A+1)/(6D)) of the Nemenyi test.

    Two algorithms whose average ranks differ by less than this are not
    significantly different at the given alpha.
    """
    if D < 1:
        raise DomainError("need at least one dataset")
    table = _Q_TABLE.get(round(alpha, 2))
    if table is None:
        raise DomainError(f"alpha {alpha} not supported (use 0.05 or 0.10)")
    if A not in table:
        raise DomainError(f"number of algorithms {A} outside the table (2..20)")
    return table[A] * np.sqrt(A * (A + 1) / (6.0 * D))


def connected_pairs(avg_ranks, cd: float) -> list[tuple[int, int]]:
    """Index pairs whose average-rank difference is below the critical distance."""
    avg_ranks = np.asarray(avg_ranks, dtype=np.float64)
    pairs = []
    for i in range(avg_ranks.shape[0]):
        for j in range(i + 1, avg_ranks.shape[0]):
            if abs(avg_ranks[i] - avg_ranks[j]) < cd:
                pairs.append((i, j))
    return pairs


def _exact_signed_rank_p(scaled_ranks: np.ndarray, w_scaled: int) -> float:
    """Two-sided p by counting sign assignments with a subset-sum table."""
    total = int(scaled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in scaled_ranks:
        counts[r:] = counts[r:] + counts[:-r or None]
    n_assignments = 2.0 ** scaled_ranks.shape[0]
    p_le = counts[: w_scaled + 1].sum() / n_assignments
    p_ge = counts[w_scaled:].sum() / n_assignments
    return min(1.0, 2.0 * min(p_le, p_ge))


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped and tied absolute differences get average
    ranks. The p-value is exact (full distribution of the positive-rank sum)
    for up to 20 usable pairs, and a normal approximation with continuity
    and tie corrections above that.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError("paired samples must be equal-length vectors")
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = diffs.shape[0]
    if n < 5:
        raise InsufficientDataError(
            f"only {n} nonzero differences; need at least 5"
        )
    ranks = spstats.rankdata(np.abs(diffs), method="average")
    w_plus = float(ranks[diffs > 0].sum())
    if n <= 20:
        scaled = np.rint(2.0 * ranks).astype(np.int64)  # half-ranks -> integers
        return _exact_signed_rank_p(scaled, int(round(2.0 * w_plus)))
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(
        tie_counts**3 - tie_counts
    ) / 48.0
    z = (abs(w_plus - mean) - 0.5) / np.sqrt(variance)
    return float(min(1.0, 2.0 * spstats.norm.sf(z)))
