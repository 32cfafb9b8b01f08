"""Logistic regression on thresholded covariates with a fusion penalty."""

from ._filterlr import (
    Dataset,
    FilterRuntimeError,
    Model,
    ThresholdSet,
    ValidationError,
    auc,
    estimate_thresholds,
    evaluate,
    fit,
    load_csv,
    risk_scores,
    risk_table,
    simulate,
)

__all__ = [
    "Dataset",
    "FilterRuntimeError",
    "Model",
    "ThresholdSet",
    "ValidationError",
    "auc",
    "estimate_thresholds",
    "evaluate",
    "fit",
    "load_csv",
    "risk_scores",
    "risk_table",
    "simulate",
]

__version__ = "0.1.0"
