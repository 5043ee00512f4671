"""Unit tests for fitting all families and ranking them."""
import numpy as np
import pytest

from conftest import synthetic_pairs
from prior_lens.elicitation import BUILTIN_SCENARIOS, REFERENCE_PRIORS
from prior_lens.fitting import FitOptions, FitResult, ModelRanking, rank_results, select_model
from prior_lens.priors import ErlangPrior, GaussianPrior, PowerLawPrior, PredictionPair
from prior_lens.utils.errors import InsufficientDataError


def test_select_erlang_data():
    """Test Erlang data picks erlang with the lowest mse."""
    ranking = select_model(synthetic_pairs(ErlangPrior(beta=18.09), range(10, 71, 5)))
    assert isinstance(ranking, ModelRanking)
    assert ranking.best.family == "erlang"
    assert all(ranking.best.mse <= other.mse for other in ranking)
    assert ranking.best.params["beta"] == pytest.approx(18.09, abs=1e-6)


def test_select_power_law_data():
    """Test power-law data picks power-law."""
    ranking = select_model(synthetic_pairs(PowerLawPrior(gamma=1.15), range(2, 68)))
    assert ranking.best.family == "power-law"
    assert ranking.best.params["gamma"] == pytest.approx(1.15, abs=1e-6)


def test_select_gaussian_data():
    """Test Gaussian data picks gaussian."""
    ranking = select_model(
        synthetic_pairs(GaussianPrior(mu=111.19, sigma=36.72), range(30, 111))
    )
    assert ranking.best.family == "gaussian"


@pytest.mark.parametrize("scenario_id", sorted(REFERENCE_PRIORS))
def test_select_reference_priors(scenario_id, fast_cfg):
    """Test every reference prior is recovered over its scenario grid."""
    prior = REFERENCE_PRIORS[scenario_id]
    grid = BUILTIN_SCENARIOS[scenario_id].t_grid
    ranking = select_model(synthetic_pairs(prior, grid, fast_cfg), cfg=fast_cfg)
    assert ranking.best.family == prior.family


def test_select_needs_three_pairs():
    """Test fewer than three pairs is insufficient data."""
    with pytest.raises(InsufficientDataError):
        select_model([PredictionPair(t=1, t_star=2), PredictionPair(t=2, t_star=4)])


def test_select_counts_rejected_pairs():
    """Test non-positive predictions are tallied, not fitted."""
    pairs = synthetic_pairs(ErlangPrior(beta=5), range(1, 11))
    pairs += [PredictionPair(t=3, t_star=0.0), PredictionPair(t=4, t_star=-2.0)]
    ranking = select_model(pairs)
    assert ranking.rejected == 2
    assert ranking.best.n == 10


def test_select_aggregates_replicates():
    """Test replicates sharing t are collapsed before fitting."""
    pairs = synthetic_pairs(ErlangPrior(beta=5), range(1, 11)) * 3
    ranking = select_model(pairs, FitOptions(replicate_aggregation="median"))
    assert ranking.best.n == 10


def test_select_is_deterministic(fast_cfg):
    """Test identical inputs give identical rankings."""
    pairs = synthetic_pairs(GaussianPrior(mu=11.37, sigma=5.02), range(1, 32), fast_cfg)
    assert select_model(pairs, cfg=fast_cfg) == select_model(pairs, cfg=fast_cfg)


def test_rank_ties_prefer_fewer_parameters():
    """Test equal mse goes to fewer parameters, then family order."""
    gaussian = FitResult(family="gaussian", params={"mu": 1.0, "sigma": 1.0}, mse=1.0, n=5)
    erlang = FitResult(family="erlang", params={"beta": 1.0}, mse=1.0, n=5)
    power = FitResult(family="power-law", params={"gamma": 1.0}, mse=1.0, n=5)
    ranked = rank_results([gaussian, erlang, power])
    assert [r.family for r in ranked] == ["power-law", "erlang", "gaussian"]


def test_rank_orders_by_mse():
    """Test lower mse ranks first regardless of parameter count."""
    gaussian = FitResult(family="gaussian", params={"mu": 1.0, "sigma": 1.0}, mse=0.5, n=5)
    power = FitResult(family="power-law", params={"gamma": 1.0}, mse=1.0, n=5)
    assert rank_results([power, gaussian])[0].family == "gaussian"


def _noisy(pairs, rng):
    t_star = np.array([p.t_star for p in pairs])
    sd = 0.01 * float(np.mean(t_star))
    noisy = t_star + rng.normal(0, sd, size=t_star.size)
    return [PredictionPair(t=p.t, t_star=float(s)) for p, s in zip(pairs, noisy)]


@pytest.mark.slow
@pytest.mark.parametrize("scenario_id", sorted(REFERENCE_PRIORS))
def test_select_under_noise(scenario_id, fast_cfg):
    """Test 1%-of-mean noise keeps the generating family in 95 of 100 trials."""
    prior = REFERENCE_PRIORS[scenario_id]
    clean = synthetic_pairs(prior, BUILTIN_SCENARIOS[scenario_id].t_grid, fast_cfg)
    hits = 0
    for seed in range(100):
        ranking = select_model(_noisy(clean, np.random.default_rng(seed)), cfg=fast_cfg)
        hits += ranking.best.family == prior.family
    assert hits >= 95
