"""Ranking-capable classifiers: train, predict, and emit a feature ranking.

Two wrapped classifiers are provided. The logistic ranker trains one-vs-rest
heads by full-batch gradient descent on L2-regularized log-loss and ranks
features by the L2 norm of their coefficients across heads. The forest ranker
bags Gini-split decision trees, each tree drawing a bootstrap sample of rows
and a random fraction of the features, and ranks features by total
Gini-impurity decrease. Both are deterministic given (seed, data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, FeatureRanking


@dataclass(frozen=True)
class LogisticParams:
    l2_strength: float = 1e-3
    max_epochs: int = 300
    learning_rate: float = 0.5
    tolerance: float = 1e-4


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 30
    feature_fraction: float = 0.3
    max_depth: int | None = None
    min_leaf: int = 1


@dataclass(frozen=True)
class RankerConfig:
    """Which classifier to wrap and how; only the chosen kind's block is read."""

    kind: str = "logistic"
    seed: int = 0
    logistic: LogisticParams = field(default_factory=LogisticParams)
    forest: ForestParams = field(default_factory=ForestParams)

    def __post_init__(self):
        if self.kind not in ("logistic", "forest"):
            raise DomainError(f"unknown ranker kind {self.kind!r}")
        if self.kind == "logistic":
            p = self.logistic
            if p.l2_strength <= 0 or p.learning_rate <= 0 or p.tolerance <= 0:
                raise DomainError("logistic parameters must be positive")
        else:
            p = self.forest
            if p.n_trees < 1 or not (0 < p.feature_fraction <= 1) or p.min_leaf < 1:
                raise DomainError("invalid forest parameters")


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_objective(
    coef: np.ndarray,
    intercept: np.ndarray,
    X: np.ndarray,
    targets: np.ndarray,
    l2_strength: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss and gradients of the one-vs-rest regularized log-loss.

    Loss = sum over heads of the mean binary cross-entropy plus
    (l2/2)*||coef||^2; intercepts are not regularized. ``targets`` is the
    n x C {0,1} indicator matrix.
    """
    n = X.shape[0]
    z = X @ coef + intercept
    # log(1 + e^z) - t*z is the per-example, per-head cross-entropy
    loss = float(np.sum(np.logaddexp(0.0, z) - targets * z) / n)
    loss += 0.5 * l2_strength * float(np.sum(coef * coef))
    residual = _stable_sigmoid(z) - targets
    grad_coef = X.T @ residual / n + l2_strength * coef
    grad_intercept = residual.sum(axis=0) / n
    return loss, grad_coef, grad_intercept


@dataclass(frozen=True)
class LogisticModel:
    coef: np.ndarray  # f x C
    intercept: np.ndarray  # C
    feature_subset: tuple[int, ...]
    n_classes: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = _check_columns(X, len(self.feature_subset))
        scores = X @ self.coef + self.intercept
        return np.argmax(scores, axis=1).astype(np.int64)

    def rank_features(self) -> FeatureRanking:
        norms = np.sqrt(np.sum(self.coef * self.coef, axis=1))
        return _order_by_score(norms, self.feature_subset)


@dataclass(frozen=True)
class TreeNode:
    """Split node over a local column, or a leaf when feature is None."""

    feature: int | None
    threshold: float
    prediction: int
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    importances: np.ndarray  # per local column, total impurity decrease
    feature_subset: tuple[int, ...]
    n_classes: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = _check_columns(X, len(self.feature_subset))
        votes = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        for tree in self.trees:
            votes[np.arange(X.shape[0]), _tree_predict(tree, X)] += 1
        return np.argmax(votes, axis=1).astype(np.int64)  # ties -> smallest class

    def rank_features(self) -> FeatureRanking:
        return _order_by_score(self.importances, self.feature_subset)


TrainedModel = LogisticModel | ForestModel


def _check_columns(X: np.ndarray, expected: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != expected:
        raise DomainError(f"model expects {expected} columns")
    return X


def _order_by_score(scores: np.ndarray, feature_subset: tuple[int, ...]) -> FeatureRanking:
    """Descending score; ties broken by the smaller original feature index."""
    original = np.asarray(feature_subset)
    order = sorted(range(len(original)), key=lambda j: (-scores[j], original[j]))
    return FeatureRanking(tuple(int(original[j]) for j in order))


def train(config: RankerConfig, X: np.ndarray, y: np.ndarray,
          feature_subset=None, n_classes: int | None = None) -> TrainedModel:
    """Fit the configured classifier; deterministic given (config.seed, X, y).

    ``feature_subset`` names the original indices of X's columns (defaults to
    0..f-1) and is carried into the model so rankings map back to the
    original feature space.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DomainError("X rows and y length must match")
    if not np.all(np.isfinite(X)):
        raise DomainError("training matrix contains NaN or Inf")
    if len(np.unique(y)) < 2:
        raise DomainError("training labels contain a single class")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if feature_subset is None:
        feature_subset = tuple(range(X.shape[1]))
    else:
        feature_subset = tuple(int(i) for i in feature_subset)
        if len(feature_subset) != X.shape[1]:
            raise DomainError("feature_subset length must match column count")

    if config.kind == "logistic":
        return _train_logistic(config, X, y, feature_subset, n_classes)
    return _train_forest(config, X, y, feature_subset, n_classes)


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    return model.predict(X)


def rank_features(model: TrainedModel) -> FeatureRanking:
    return model.rank_features()


# ---------------------------------------------------------------------------
# logistic

def _train_logistic(config, X, y, feature_subset, n_classes) -> LogisticModel:
    params = config.logistic
    n, f = X.shape
    targets = np.zeros((n, n_classes), dtype=np.float64)
    targets[np.arange(n), y] = 1.0
    coef = np.zeros((f, n_classes))
    intercept = np.zeros(n_classes)
    for _ in range(params.max_epochs):
        _, grad_coef, grad_intercept = logistic_objective(
            coef, intercept, X, targets, params.l2_strength
        )
        gnorm = math.sqrt(float(np.sum(grad_coef**2) + np.sum(grad_intercept**2)))
        if gnorm < params.tolerance:
            break
        coef = coef - params.learning_rate * grad_coef
        intercept = intercept - params.learning_rate * grad_intercept
    coef.flags.writeable = False
    intercept.flags.writeable = False
    return LogisticModel(coef=coef, intercept=intercept,
                         feature_subset=feature_subset, n_classes=n_classes)


# ---------------------------------------------------------------------------
# forest

def _train_forest(config, X, y, feature_subset, n_classes) -> ForestModel:
    params = config.forest
    n, f = X.shape
    n_sub = min(f, math.ceil(params.feature_fraction * f))
    importances = np.zeros(f)
    trees = []
    # one child seed per tree, independent of any execution order
    for child in np.random.SeedSequence(config.seed).spawn(params.n_trees):
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, size=n)  # bootstrap with replacement
        columns = np.sort(rng.permutation(f)[:n_sub])  # per-tree feature sample
        trees.append(
            _grow_tree(X[rows], y[rows], columns, n_classes, params, 0, importances)
        )
    importances.flags.writeable = False
    return ForestModel(trees=tuple(trees), importances=importances,
                       feature_subset=feature_subset, n_classes=n_classes)


def _majority(y: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(y, minlength=n_classes)))


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _best_split(X, y, columns, n_classes, min_leaf):
    """Best (column, threshold, impurity decrease) over the sampled columns.

    Decrease is count-weighted: N*G - (N_L*G_L + N_R*G_R). Ties keep the
    first candidate found, i.e. the smallest column then smallest threshold.
    """
    n = y.shape[0]
    parent_counts = np.bincount(y, minlength=n_classes)
    parent_term = n * _gini(parent_counts)
    best = (None, 0.0, 0.0)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    for j in columns:
        values = X[:, j]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        left_counts = np.cumsum(onehot[order], axis=0)  # counts after t+1 rows
        boundaries = np.flatnonzero(sv[:-1] < sv[1:]) + 1  # split before row t
        if boundaries.size == 0:
            continue
        if min_leaf > 1:
            boundaries = boundaries[
                (boundaries >= min_leaf) & (n - boundaries >= min_leaf)
            ]
            if boundaries.size == 0:
                continue
        lc = left_counts[boundaries - 1]
        rc = parent_counts - lc
        nl = boundaries.astype(np.float64)
        nr = n - nl
        gl = 1.0 - np.sum((lc / nl[:, None]) ** 2, axis=1)
        gr = 1.0 - np.sum((rc / nr[:, None]) ** 2, axis=1)
        decreases = parent_term - (nl * gl + nr * gr)
        t = int(np.argmax(decreases))
        if decreases[t] > best[2]:
            threshold = 0.5 * (sv[boundaries[t] - 1] + sv[boundaries[t]])
            best = (int(j), float(threshold), float(decreases[t]))
    return best


def _grow_tree(X, y, columns, n_classes, params, depth, importances) -> TreeNode:
    prediction = _majority(y, n_classes)
    if (
        y.shape[0] < 2 * params.min_leaf
        or (params.max_depth is not None and depth >= params.max_depth)
        or np.all(y == y[0])
    ):
        return TreeNode(None, 0.0, prediction)
    feature, threshold, decrease = _best_split(X, y, columns, n_classes, params.min_leaf)
    if feature is None or decrease <= 0.0:
        return TreeNode(None, 0.0, prediction)
    importances[feature] += decrease
    go_left = X[:, feature] <= threshold
    left = _grow_tree(X[go_left], y[go_left], columns, n_classes, params,
                      depth + 1, importances)
    right = _grow_tree(X[~go_left], y[~go_left], columns, n_classes, params,
                       depth + 1, importances)
    return TreeNode(feature, threshold, prediction, left, right)


def _tree_predict(tree: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.int64)
    stack = [(tree, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if node.feature is None:
            out[idx] = node.prediction
            continue
        go_left = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[go_left]))
        stack.append((node.right, idx[~go_left]))
    return out


def tree_features_used(tree: TreeNode) -> set[int]:
    """Local column indices the tree actually splits on."""
    used: set[int] = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.feature is not None:
            used.add(node.feature)
            stack.extend([node.left, node.right])
    return used
