"""Models for prior families, observations and quadrature settings."""
import math
from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class PowerLawPrior(BaseModel):
    """P(t_total) proportional to t_total^(-gamma); scale-free."""

    model_config = ConfigDict(frozen=True)

    family: Literal["power-law"] = "power-law"
    gamma: float = Field(gt=0, allow_inf_nan=False, description="Power-law exponent")


class ErlangPrior(BaseModel):
    """P(t_total) proportional to t_total * exp(-t_total / beta)."""

    model_config = ConfigDict(frozen=True)

    family: Literal["erlang"] = "erlang"
    beta: float = Field(gt=0, allow_inf_nan=False, description="Scale, in scenario units")


class GaussianPrior(BaseModel):
    """Normal prior with mean mu and standard deviation sigma."""

    model_config = ConfigDict(frozen=True)

    family: Literal["gaussian"] = "gaussian"
    mu: float = Field(allow_inf_nan=False, description="Mean, in scenario units")
    sigma: float = Field(gt=0, allow_inf_nan=False, description="Standard deviation")


class TabulatedPrior(BaseModel):
    """Density given on a grid, linearly interpolated inside the support."""

    model_config = ConfigDict(frozen=True)

    family: Literal["tabulated"] = "tabulated"
    support: List[float] = Field(min_length=2)
    density: List[float] = Field(min_length=2)

    @model_validator(mode="after")
    def _check_grid(self) -> "TabulatedPrior":
        support = np.asarray(self.support, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if support.shape != density.shape:
            raise ValueError("support and density must have the same length")
        if not np.all(np.isfinite(support)) or support[0] <= 0:
            raise ValueError("support values must be finite and > 0")
        if np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing")
        if not np.all(np.isfinite(density)) or np.any(density < 0):
            raise ValueError("density values must be finite and >= 0")
        mass = float(np.trapezoid(density, support))
        if not (mass > 0 and math.isfinite(mass)):
            raise ValueError("density must integrate to a positive finite value")
        return self


PriorSpec = Annotated[
    Union[PowerLawPrior, ErlangPrior, GaussianPrior, TabulatedPrior],
    Field(discriminator="family"),
]


class PredictionPair(BaseModel):
    """One observation: partial value t and predicted total t_star."""

    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0, allow_inf_nan=False)
    t_star: float = Field(allow_inf_nan=False)


class QuadratureConfig(BaseModel):
    """Grid settings for the numeric posterior median."""

    model_config = ConfigDict(frozen=True)

    grid_points: int = Field(32769, ge=1025)
    tail_mass_epsilon: float = Field(1e-9, gt=0, lt=1e-3)
