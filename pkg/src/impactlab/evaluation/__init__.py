"""Metrics, cross-validation and significance testing for impact predictors."""

from .crossval import (
    ALL_TECHNIQUES,
    CrossValReport,
    MutantScore,
    Technique,
    cross_validate,
    evaluate,
    fold_orders,
    partition,
    threshold_sweep,
)
from .metrics import BohnerSets, MetricTriple, bohner_sets, fscore, metrics, weight_histogram
from .stats import MannWhitneyResult, mann_whitney_u

__all__ = [
    "ALL_TECHNIQUES",
    "BohnerSets",
    "CrossValReport",
    "MannWhitneyResult",
    "MetricTriple",
    "MutantScore",
    "Technique",
    "bohner_sets",
    "cross_validate",
    "evaluate",
    "fold_orders",
    "fscore",
    "mann_whitney_u",
    "metrics",
    "partition",
    "threshold_sweep",
    "weight_histogram",
]
