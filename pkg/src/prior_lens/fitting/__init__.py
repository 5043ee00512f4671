"""Prior recovery: fit prediction functions to observed (t, t*) pairs."""

from .core import (
    ModelRanking,
    aggregate_replicates,
    clean_pairs,
    fit_erlang,
    fit_gaussian,
    fit_power_law,
    mse,
    rank_results,
    select_model,
)
from .models import FitOptions, FitResult, GaussianInitGrid

__all__ = [
    "FitOptions",
    "FitResult",
    "GaussianInitGrid",
    "ModelRanking",
    "aggregate_replicates",
    "clean_pairs",
    "fit_erlang",
    "fit_gaussian",
    "fit_power_law",
    "mse",
    "rank_results",
    "select_model",
]
