"""Prior families and posterior-median prediction functions."""

from .core import (
    log_prior_density,
    median_curve,
    posterior_median,
    posterior_median_analytic,
    posterior_median_numeric,
    prediction_curve,
    prior_density,
    upper_limit,
)
from .models import (
    ErlangPrior,
    GaussianPrior,
    PowerLawPrior,
    PredictionPair,
    PriorSpec,
    QuadratureConfig,
    TabulatedPrior,
)

__all__ = [
    "ErlangPrior",
    "GaussianPrior",
    "PowerLawPrior",
    "PredictionPair",
    "PriorSpec",
    "QuadratureConfig",
    "TabulatedPrior",
    "log_prior_density",
    "median_curve",
    "posterior_median",
    "posterior_median_analytic",
    "posterior_median_numeric",
    "prediction_curve",
    "prior_density",
    "upper_limit",
]
