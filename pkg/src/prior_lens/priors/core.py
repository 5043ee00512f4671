"""Prior densities and posterior-median prediction functions.

The likelihood of observing t given a total t_total is 1/t_total for
0 < t <= t_total, so the posterior over t_total is prior(x)/x on x >= t.
Densities are unnormalized throughout; medians do not depend on scale.

Numeric medians are computed on a grid uniform in u = ln x. In u the posterior
weight is the prior density itself (prior(x)/x * dx = prior(x) * du), which keeps
heavy power-law tails and far-tail Gaussians on the same footing.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from prior_lens.utils.errors import (
    DegeneratePosteriorError,
    DomainError,
    PreconditionError,
    PredictionError,
    PriorLensError,
    UnsupportedFamilyError,
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

logger = logging.getLogger("prior_lens.priors")

LN2 = math.log(2.0)
GAUSSIAN_TAIL_SIGMAS = 12.0
# Shared-grid medians whose remaining mass falls below this fraction of the
# grid total are recomputed on their own grid.
SHARED_GRID_MIN_MASS = 1e-6


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"x must be finite and > 0, got {x}")
    return x


def _log_density(prior: PriorSpec, x: np.ndarray) -> np.ndarray:
    """Vectorised log of the unnormalized prior density; -inf where it is 0."""
    if isinstance(prior, PowerLawPrior):
        return -prior.gamma * np.log(x)
    if isinstance(prior, ErlangPrior):
        return np.log(x) - x / prior.beta
    if isinstance(prior, GaussianPrior):
        return stats.norm.logpdf(x, loc=prior.mu, scale=prior.sigma)
    if isinstance(prior, TabulatedPrior):
        values = np.interp(x, prior.support, prior.density, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(values)
    raise UnsupportedFamilyError(f"unknown prior family: {prior!r}")


def prior_density(prior: PriorSpec, x: float) -> float:
    """Unnormalized prior density at x.

    Args:
        prior: Prior family and parameters
        x: Point of evaluation, finite and > 0

    Returns:
        Density up to a constant factor. Gaussian is the normal pdf; tabulated
        densities are linearly interpolated and 0 outside their support.

    Raises:
        DomainError: If x is not finite or not positive
    """
    x = _check_x(x)
    if isinstance(prior, PowerLawPrior):
        return x ** (-prior.gamma)
    if isinstance(prior, ErlangPrior):
        return x * math.exp(-x / prior.beta)
    if isinstance(prior, GaussianPrior):
        return float(stats.norm.pdf(x, loc=prior.mu, scale=prior.sigma))
    if isinstance(prior, TabulatedPrior):
        return float(np.interp(x, prior.support, prior.density, left=0.0, right=0.0))
    raise UnsupportedFamilyError(f"unknown prior family: {prior!r}")


def log_prior_density(prior: PriorSpec, x: float) -> float:
    """Log of prior_density; -inf where the density vanishes."""
    x = _check_x(x)
    return float(_log_density(prior, np.asarray([x]))[0])


def posterior_median_analytic(prior: PriorSpec, t: float) -> float:
    """Closed-form posterior median for power-law and Erlang priors.

    Raises:
        UnsupportedFamilyError: For Gaussian or tabulated priors
        DomainError: If t is not finite or not positive
    """
    t = _check_x(t)
    if isinstance(prior, PowerLawPrior):
        return t * 2.0 ** (1.0 / prior.gamma)
    if isinstance(prior, ErlangPrior):
        return t + prior.beta * LN2
    raise UnsupportedFamilyError(
        f"no closed-form prediction function for the {prior.family} family; "
        "use posterior_median_numeric"
    )


def upper_limit(prior: PriorSpec, t: float, tail_mass_epsilon: float) -> float:
    """Upper truncation point T_max of the posterior integration range."""
    if isinstance(prior, PowerLawPrior):
        return t * tail_mass_epsilon ** (-1.0 / prior.gamma)
    if isinstance(prior, ErlangPrior):
        return t + prior.beta * math.log(1.0 / tail_mass_epsilon)
    if isinstance(prior, GaussianPrior):
        return max(prior.mu, t) + GAUSSIAN_TAIL_SIGMAS * prior.sigma
    if isinstance(prior, TabulatedPrior):
        return prior.support[-1]
    raise UnsupportedFamilyError(f"unknown prior family: {prior!r}")


class _PosteriorGrid:
    """Cumulative posterior mass on a log-spaced grid over [lower, upper]."""

    def __init__(self, prior: PriorSpec, lower: float, upper: float, points: int):
        if not upper > lower:
            raise DegeneratePosteriorError(
                f"empty integration range [{lower}, {upper}] for {prior.family} prior"
            )
        self.u = np.linspace(math.log(lower), math.log(upper), points)
        log_w = _log_density(prior, np.exp(self.u))
        peak = np.max(log_w)
        if not np.isfinite(peak):
            raise DegeneratePosteriorError(
                f"posterior has zero mass on [{lower}, {upper}] for {prior.family} prior"
            )
        weights = np.exp(log_w - peak)
        self.cumulative = cumulative_trapezoid(weights, self.u, initial=0.0)
        self.total = float(self.cumulative[-1])
        if not self.total > 0:
            raise DegeneratePosteriorError(
                f"posterior has zero mass on [{lower}, {upper}] for {prior.family} prior"
            )

    def mass_below(self, u: np.ndarray) -> np.ndarray:
        return np.interp(u, self.u, self.cumulative)

    def invert(self, target: np.ndarray) -> np.ndarray:
        """Linear interpolation of u where the cumulative reaches target."""
        idx = np.searchsorted(self.cumulative, target, side="left")
        idx = np.clip(idx, 1, len(self.u) - 1)
        c0 = self.cumulative[idx - 1]
        c1 = self.cumulative[idx]
        step = c1 - c0
        frac = np.divide(target - c0, step, out=np.zeros_like(target), where=step > 0)
        return self.u[idx - 1] + frac * (self.u[idx] - self.u[idx - 1])


def posterior_median_numeric(
    prior: PriorSpec, t: float, cfg: Optional[QuadratureConfig] = None
) -> float:
    """Posterior median by trapezoid quadrature on [t, T_max].

    Args:
        prior: Any prior family
        t: Observed partial value, > 0
        cfg: Quadrature grid settings (defaults if omitted)

    Returns:
        The 0.5 quantile of the posterior, >= t

    Raises:
        DegeneratePosteriorError: If the posterior has no mass on [t, T_max]
    """
    cfg = cfg or QuadratureConfig()
    t = _check_x(t)
    grid = _PosteriorGrid(
        prior, t, upper_limit(prior, t, cfg.tail_mass_epsilon), cfg.grid_points
    )
    u_star = grid.invert(np.asarray([0.5 * grid.total]))[0]
    return max(t, math.exp(u_star))


def posterior_median(
    prior: PriorSpec, t: float, cfg: Optional[QuadratureConfig] = None
) -> float:
    """Posterior median, analytic where the family allows it."""
    if isinstance(prior, (PowerLawPrior, ErlangPrior)):
        return posterior_median_analytic(prior, t)
    return posterior_median_numeric(prior, t, cfg)


def _check_t_values(t_values: Sequence[float]) -> List[float]:
    values = [float(t) for t in t_values]
    if not values:
        raise PreconditionError("t_values must be nonempty")
    return values


def prediction_curve(
    prior: PriorSpec,
    t_values: Sequence[float],
    cfg: Optional[QuadratureConfig] = None,
    max_workers: Optional[int] = None,
) -> List[PredictionPair]:
    """Posterior median for every t, in input order.

    Args:
        prior: Prior family and parameters
        t_values: Nonempty sequence of positive t
        cfg: Quadrature settings for the numeric path
        max_workers: Evaluate elements on a thread pool of this size

    Raises:
        PreconditionError: If t_values is empty
        PredictionError: Wrapping the first element failure, with its t
    """
    values = _check_t_values(t_values)

    def _predict(t: float) -> PredictionPair:
        try:
            return PredictionPair(t=t, t_star=posterior_median(prior, t, cfg))
        except PriorLensError as e:
            raise PredictionError(t, e) from e

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(_predict, values))
    return [_predict(t) for t in values]


def median_curve(
    prior: PriorSpec,
    t_values: Sequence[float],
    cfg: Optional[QuadratureConfig] = None,
) -> np.ndarray:
    """Posterior medians for many t at once.

    Analytic families are evaluated in closed form. Other families share one
    grid spanning [min t, T_max(max t)]; elements left with too little mass on
    that grid are recomputed individually.
    """
    cfg = cfg or QuadratureConfig()
    t = np.asarray(_check_t_values(t_values), dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("every t must be finite and > 0")
    if isinstance(prior, PowerLawPrior):
        return t * 2.0 ** (1.0 / prior.gamma)
    if isinstance(prior, ErlangPrior):
        return t + prior.beta * LN2

    lower = float(t.min())
    upper = upper_limit(prior, float(t.max()), cfg.tail_mass_epsilon)
    try:
        grid = _PosteriorGrid(prior, lower, upper, cfg.grid_points)
    except DegeneratePosteriorError:
        logger.debug(f"Shared grid on [{lower:g}, {upper:g}] is degenerate; evaluating per t")
        return np.asarray([posterior_median_numeric(prior, x, cfg) for x in t])

    below = grid.mass_below(np.log(t))
    remaining = grid.total - below
    medians = np.exp(grid.invert(below + 0.5 * remaining))
    medians = np.maximum(medians, t)
    sparse = np.flatnonzero(remaining < SHARED_GRID_MIN_MASS * grid.total)
    if sparse.size:
        logger.debug(f"Recomputing {sparse.size} far-tail medians on their own grids")
    for i in sparse:
        medians[i] = posterior_median_numeric(prior, float(t[i]), cfg)
    return medians
