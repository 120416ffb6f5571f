"""Feature selection with Fibonacci and k-subsecting recursive elimination."""

from .core import (
    Dataset,
    DomainError,
    FeatureRanking,
    FoldAssignment,
    InsufficientDataError,
    SearchTrace,
    SelectionResult,
    select_top,
)
from .crossval import aggregate_ranking, cv_evaluate, stratified_folds
from .harness import (
    ExperimentConfig,
    RunRecord,
    StrategySpec,
    emit_curve,
    load_csv,
    run_experiment,
)
from .metrics import ConfusionMatrix, accuracy, confusion, g_mean, kappa, macro_recall
from .preprocess import MinMaxScaler, apply_minmax, fit_minmax
from .rankers import RankerConfig, predict, rank_features, train
from .search import (
    SearchConfig,
    fibonacci_search,
    fibonacci_upto,
    final_selection,
    frfe,
    ksrfe,
    ksubsect_search,
    rfe_fixed_steps,
)
from .stats import friedman_test, nemenyi_cd, wilcoxon_signed_rank

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix",
    "Dataset",
    "DomainError",
    "ExperimentConfig",
    "FeatureRanking",
    "FoldAssignment",
    "InsufficientDataError",
    "MinMaxScaler",
    "RankerConfig",
    "RunRecord",
    "SearchConfig",
    "SearchTrace",
    "SelectionResult",
    "StrategySpec",
    "accuracy",
    "aggregate_ranking",
    "apply_minmax",
    "confusion",
    "cv_evaluate",
    "emit_curve",
    "fibonacci_search",
    "fibonacci_upto",
    "final_selection",
    "fit_minmax",
    "friedman_test",
    "frfe",
    "g_mean",
    "kappa",
    "ksrfe",
    "ksubsect_search",
    "load_csv",
    "macro_recall",
    "nemenyi_cd",
    "predict",
    "rank_features",
    "rfe_fixed_steps",
    "run_experiment",
    "select_top",
    "stratified_folds",
    "train",
    "wilcoxon_signed_rank",
]
