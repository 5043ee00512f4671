"""Recover prior parameters from observed (t, t*) pairs.

Each family is fitted by minimizing the unweighted mean squared difference
between observed predictions and the family's prediction function, in raw
scenario units. Power-law and Erlang have exact closed-form minimizers; the
Gaussian is searched by multi-start Nelder-Mead over (mu, log sigma).
"""
import functools
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.optimize import minimize

from prior_lens.priors import (
    GaussianPrior,
    PredictionPair,
    PriorSpec,
    QuadratureConfig,
    median_curve,
)
from prior_lens.priors.core import LN2
from prior_lens.utils.errors import (
    ConvergenceError,
    DegeneratePosteriorError,
    DomainError,
    InsufficientDataError,
    PreconditionError,
    PriorLensError,
)

from .models import FAMILY_ORDER, Aggregation, FitOptions, FitResult

logger = logging.getLogger("prior_lens.fitting")

POWER_LAW_MIN_SLOPE = 1.0 + 1e-9
ERLANG_MIN_BETA_FRACTION = 1e-9
TIE_TOLERANCE = 1e-12
# Objective value for parameter sets the posterior cannot be evaluated at.
INFEASIBLE_MSE = 1e300


class ModelRanking(list):
    """FitResults ascending by mse, plus the bookkeeping of how they were made.

    Attributes:
        excluded: Families whose fit raised, mapped to the error message
        rejected: Pairs dropped before fitting (t* <= 0 or non-finite)
    """

    def __init__(
        self,
        results: Iterable[FitResult] = (),
        excluded: Optional[Dict[str, str]] = None,
        rejected: int = 0,
    ):
        super().__init__(results)
        self.excluded = dict(excluded or {})
        self.rejected = rejected

    @property
    def best(self) -> FitResult:
        return self[0]


def clean_pairs(pairs: Sequence[PredictionPair]) -> Tuple[List[PredictionPair], int]:
    """Drop pairs whose t* is non-positive or non-finite.

    Returns:
        The kept pairs in input order and the number rejected
    """
    kept = [p for p in pairs if math.isfinite(p.t_star) and p.t_star > 0]
    return kept, len(pairs) - len(kept)


def aggregate_replicates(
    pairs: Sequence[PredictionPair], rule: Aggregation = "median"
) -> List[PredictionPair]:
    """Collapse pairs sharing t into one pair; output sorted by t."""
    if rule == "none":
        return sorted(pairs, key=lambda p: p.t)
    reducer = np.median if rule == "median" else np.mean
    grouped: Dict[float, List[float]] = {}
    for pair in pairs:
        grouped.setdefault(pair.t, []).append(pair.t_star)
    return [
        PredictionPair(t=t, t_star=float(reducer(values)))
        for t, values in sorted(grouped.items())
    ]


def _arrays(pairs: Sequence[PredictionPair]) -> Tuple[np.ndarray, np.ndarray]:
    t = np.asarray([p.t for p in pairs], dtype=float)
    t_star = np.asarray([p.t_star for p in pairs], dtype=float)
    return t, t_star


def _prepare(pairs: Sequence[PredictionPair], minimum: int, family: str):
    kept, _ = clean_pairs(pairs)
    if len(kept) < minimum:
        raise InsufficientDataError(
            f"{family} fit needs at least {minimum} pairs, got {len(kept)}"
        )
    return _arrays(kept)


def mse(
    pairs: Sequence[PredictionPair],
    prior: PriorSpec,
    cfg: Optional[QuadratureConfig] = None,
) -> float:
    """Mean squared difference between observed t* and the prior's predictions.

    Raises:
        PreconditionError: If pairs is empty
    """
    if not pairs:
        raise PreconditionError("mse needs at least one pair")
    t, t_star = _arrays(pairs)
    residuals = t_star - median_curve(prior, t, cfg)
    return float(np.mean(residuals**2))


def fit_power_law(pairs: Sequence[PredictionPair]) -> FitResult:
    """Least-squares slope through the origin, mapped to gamma = ln 2 / ln c."""
    t, t_star = _prepare(pairs, 2, "power-law")
    slope = float(np.dot(t, t_star) / np.dot(t, t))
    boundary = slope <= POWER_LAW_MIN_SLOPE
    if boundary:
        logger.info(f"power-law slope {slope:.6g} clamped to {POWER_LAW_MIN_SLOPE}")
        slope = POWER_LAW_MIN_SLOPE
    gamma = LN2 / math.log(slope)
    residuals = t_star - slope * t
    return FitResult(
        family="power-law",
        params={"gamma": gamma},
        mse=float(np.mean(residuals**2)),
        n=len(t),
        boundary_flag=boundary,
    )


def fit_erlang(pairs: Sequence[PredictionPair]) -> FitResult:
    """Mean offset d = mean(t* - t), mapped to beta = d / ln 2."""
    t, t_star = _prepare(pairs, 2, "erlang")
    offset = float(np.mean(t_star - t))
    boundary = offset <= 0
    if boundary:
        beta = ERLANG_MIN_BETA_FRACTION * float(np.mean(t))
        logger.info(f"erlang offset {offset:.6g} <= 0, beta clamped to {beta:.6g}")
    else:
        beta = offset / LN2
    residuals = t_star - (t + beta * LN2)
    return FitResult(
        family="erlang",
        params={"beta": beta},
        mse=float(np.mean(residuals**2)),
        n=len(t),
        boundary_flag=boundary,
    )


def _gaussian_objective(
    t: np.ndarray, t_star: np.ndarray, cfg: QuadratureConfig
) -> Callable[[np.ndarray], float]:
    def objective(theta: np.ndarray) -> float:
        mu, log_sigma = float(theta[0]), float(theta[1])
        sigma = math.exp(log_sigma) if log_sigma < 700 else math.inf
        try:
            prior = GaussianPrior(mu=mu, sigma=sigma)
            predicted = median_curve(prior, t, cfg)
        except (ValidationError, DegeneratePosteriorError, DomainError):
            return INFEASIBLE_MSE
        value = float(np.mean((t_star - predicted) ** 2))
        return value if math.isfinite(value) else INFEASIBLE_MSE

    return objective


def gaussian_starts(t_star: np.ndarray, opts: FitOptions) -> List[Tuple[float, float]]:
    """(mu, sigma) start points: t* quantiles crossed with scaled spread of t*."""
    spread = float(np.std(t_star))
    if not spread > 0:
        spread = max(1e-3 * abs(float(np.mean(t_star))), 1e-9)
    grid = opts.gaussian_init_grid
    return [
        (float(np.quantile(t_star, q)), scale * spread)
        for q in grid.mu_quantiles
        for scale in grid.sigma_scales
    ]


def fit_gaussian(
    pairs: Sequence[PredictionPair],
    opts: Optional[FitOptions] = None,
    cfg: Optional[QuadratureConfig] = None,
) -> FitResult:
    """Multi-start downhill-simplex fit of a Gaussian prior.

    Args:
        pairs: Observations, at least three after cleaning
        opts: Start grid, tolerance and evaluation budget
        cfg: Quadrature settings for the numeric medians

    Returns:
        The best terminal point over all converged starts

    Raises:
        InsufficientDataError: With fewer than three pairs
        ConvergenceError: If no start converged; carries the best point found
    """
    opts = opts or FitOptions()
    cfg = cfg or QuadratureConfig()
    t, t_star = _prepare(pairs, 3, "gaussian")
    objective = _gaussian_objective(t, t_star, cfg)
    xatol = opts.simplex_tolerance * max(1.0, float(np.max(np.abs(t_star))))
    fatol = opts.simplex_tolerance * max(1.0, float(np.mean(t_star**2)))

    finished = []
    for index, (mu0, sigma0) in enumerate(gaussian_starts(t_star, opts)):
        x0 = np.array([mu0, math.log(sigma0)])
        simplex = np.array([x0, x0 + [max(0.5 * sigma0, 1e-6), 0.0], x0 + [0.0, 0.5]])
        result = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "xatol": xatol,
                "fatol": fatol,
                "maxfev": opts.max_evaluations,
                "maxiter": opts.max_evaluations,
                "initial_simplex": simplex,
            },
        )
        logger.debug(
            f"gaussian start {index} (mu={mu0:.4g}, sigma={sigma0:.4g}): "
            f"mse={result.fun:.6g} nfev={result.nfev} success={result.success}"
        )
        finished.append((float(result.fun), index, result.x, bool(result.success)))

    finished.sort(key=lambda item: (item[0], item[1]))
    converged = [item for item in finished if item[3] and item[0] < INFEASIBLE_MSE]
    if not converged:
        best_mse, _, best_x, _ = finished[0]
        raise ConvergenceError(
            f"no gaussian start converged within {opts.max_evaluations} evaluations",
            best_point=(float(best_x[0]), math.exp(float(best_x[1]))),
            best_mse=best_mse,
        )
    best_mse, _, best_x, _ = converged[0]
    return FitResult(
        family="gaussian",
        params={"mu": float(best_x[0]), "sigma": math.exp(float(best_x[1]))},
        mse=best_mse,
        n=len(t),
        boundary_flag=False,
    )


def _compare(a: FitResult, b: FitResult) -> int:
    if abs(a.mse - b.mse) > TIE_TOLERANCE * (1.0 + max(a.mse, b.mse)):
        return -1 if a.mse < b.mse else 1
    key_a = (a.n_params, FAMILY_ORDER.index(a.family))
    key_b = (b.n_params, FAMILY_ORDER.index(b.family))
    return (key_a > key_b) - (key_a < key_b)


def rank_results(results: Iterable[FitResult]) -> List[FitResult]:
    """Ascending mse; near-ties go to fewer parameters, then family order."""
    return sorted(results, key=functools.cmp_to_key(_compare))


def select_model(
    pairs: Sequence[PredictionPair],
    opts: Optional[FitOptions] = None,
    cfg: Optional[QuadratureConfig] = None,
) -> ModelRanking:
    """Fit all three families and rank them by mse.

    Families whose fit raises are left out and listed in ``excluded``.

    Raises:
        InsufficientDataError: With fewer than three usable pairs
        PriorLensError: The first family error, if every family failed
    """
    opts = opts or FitOptions()
    cfg = cfg or QuadratureConfig()
    kept, rejected = clean_pairs(pairs)
    if rejected:
        logger.info(f"Rejected {rejected} pairs with non-positive or non-finite t*")
    kept = aggregate_replicates(kept, opts.replicate_aggregation)
    if len(kept) < 3:
        raise InsufficientDataError(
            f"model selection needs at least 3 pairs, got {len(kept)}"
        )

    fitters = {
        "power-law": lambda: fit_power_law(kept),
        "erlang": lambda: fit_erlang(kept),
        "gaussian": lambda: fit_gaussian(kept, opts, cfg),
    }
    results, excluded, errors = [], {}, []
    for family in FAMILY_ORDER:
        try:
            result = fitters[family]()
        except PriorLensError as e:
            logger.warning(f"Excluding {family} fit: {e}")
            excluded[family] = str(e)
            errors.append(e)
            continue
        logger.info(f"{family} fit: params={result.params} mse={result.mse:.6g}")
        results.append(result)

    if not results:
        raise errors[0]
    return ModelRanking(rank_results(results), excluded=excluded, rejected=rejected)
