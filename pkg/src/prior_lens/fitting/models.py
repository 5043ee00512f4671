"""Models for the fit engine."""
from typing import Dict, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from prior_lens.priors.models import ErlangPrior, GaussianPrior, PowerLawPrior

Family = Literal["power-law", "erlang", "gaussian"]
Aggregation = Literal["median", "mean", "none"]

FAMILY_ORDER: Tuple[str, ...] = ("power-law", "erlang", "gaussian")
PARAMETER_COUNT: Dict[str, int] = {"power-law": 1, "erlang": 1, "gaussian": 2}


class GaussianInitGrid(BaseModel):
    """Multi-start grid for the Gaussian simplex search."""

    model_config = ConfigDict(frozen=True)

    mu_quantiles: Tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    sigma_scales: Tuple[float, ...] = (0.1, 0.3, 1.0)


class FitOptions(BaseModel):
    """Optimizer and aggregation settings."""

    model_config = ConfigDict(frozen=True)

    gaussian_init_grid: GaussianInitGrid = Field(default_factory=GaussianInitGrid)
    simplex_tolerance: float = Field(1e-6, gt=0)
    max_evaluations: int = Field(20000, ge=100)
    replicate_aggregation: Aggregation = "median"


class FitResult(BaseModel):
    """Fitted family, its parameters and the achieved mean squared error."""

    model_config = ConfigDict(frozen=True)

    family: Family
    params: Dict[str, float]
    mse: float = Field(ge=0)
    n: int = Field(ge=1)
    boundary_flag: bool = False

    @model_validator(mode="after")
    def _check_params(self) -> "FitResult":
        self.to_prior()
        return self

    @property
    def n_params(self) -> int:
        return PARAMETER_COUNT[self.family]

    def to_prior(self):
        """PriorSpec of the fitted family and parameters."""
        if self.family == "power-law":
            return PowerLawPrior(gamma=self.params["gamma"])
        if self.family == "erlang":
            return ErlangPrior(beta=self.params["beta"])
        return GaussianPrior(mu=self.params["mu"], sigma=self.params["sigma"])
