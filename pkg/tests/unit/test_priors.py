"""Unit tests for prior densities and posterior-median prediction functions."""
import logging
import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from prior_lens.priors import (
    ErlangPrior,
    GaussianPrior,
    PowerLawPrior,
    PredictionPair,
    PriorSpec,
    QuadratureConfig,
    TabulatedPrior,
    log_prior_density,
    median_curve,
    posterior_median,
    posterior_median_analytic,
    posterior_median_numeric,
    prediction_curve,
    prior_density,
    upper_limit,
)
from prior_lens.utils.errors import (
    DegeneratePosteriorError,
    DomainError,
    PreconditionError,
    PredictionError,
    UnsupportedFamilyError,
)


def test_power_law_density():
    """Test power-law density is x^-gamma."""
    assert prior_density(PowerLawPrior(gamma=1), 2.0) == 0.5


def test_erlang_density():
    """Test Erlang density at x = beta."""
    assert prior_density(ErlangPrior(beta=1), 1.0) == pytest.approx(math.exp(-1), rel=1e-12)


def test_gaussian_density():
    """Test Gaussian density is the normal pdf."""
    value = prior_density(GaussianPrior(mu=0, sigma=1), 1.0)
    assert value == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-12)
    assert value == pytest.approx(0.2420, abs=1e-4)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_density_domain_error(x):
    """Test densities reject non-positive and non-finite x."""
    with pytest.raises(DomainError):
        prior_density(GaussianPrior(mu=0, sigma=1), x)


def test_tabulated_density_interpolates():
    """Test tabulated density is linear inside the support and zero outside."""
    prior = TabulatedPrior(support=[1.0, 3.0], density=[1.0, 3.0])
    assert prior_density(prior, 2.0) == pytest.approx(2.0)
    assert prior_density(prior, 5.0) == 0.0
    assert log_prior_density(prior, 5.0) == -math.inf


def test_log_density_matches_density():
    """Test log_prior_density agrees with log of prior_density."""
    prior = ErlangPrior(beta=18.09)
    assert log_prior_density(prior, 30.0) == pytest.approx(math.log(prior_density(prior, 30.0)))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"support": [1.0, 1.0], "density": [1.0, 1.0]},
        {"support": [0.0, 1.0], "density": [1.0, 1.0]},
        {"support": [1.0, 2.0], "density": [1.0, -1.0]},
        {"support": [1.0, 2.0], "density": [0.0, 0.0]},
        {"support": [1.0, 2.0, 3.0], "density": [1.0, 1.0]},
    ],
)
def test_tabulated_prior_validation(kwargs):
    """Test invalid tabulated grids are rejected."""
    with pytest.raises(ValidationError):
        TabulatedPrior(**kwargs)


def test_prior_parameters_validated():
    """Test family parameters must be positive and finite."""
    with pytest.raises(ValidationError):
        PowerLawPrior(gamma=0)
    with pytest.raises(ValidationError):
        ErlangPrior(beta=-1)
    with pytest.raises(ValidationError):
        GaussianPrior(mu=1, sigma=0)
    with pytest.raises(ValidationError):
        GaussianPrior(mu=math.nan, sigma=1)


def test_prior_spec_discriminator():
    """Test PriorSpec parses by family name."""
    adapter = TypeAdapter(PriorSpec)
    prior = adapter.validate_python({"family": "erlang", "beta": 18.09})
    assert prior == ErlangPrior(beta=18.09)


def test_analytic_power_law():
    """Test closed-form power-law medians."""
    assert posterior_median_analytic(PowerLawPrior(gamma=1), 7) == 14
    assert posterior_median_analytic(PowerLawPrior(gamma=1.2), 50) == pytest.approx(89.090, abs=1e-3)


def test_analytic_erlang():
    """Test closed-form Erlang median."""
    assert posterior_median_analytic(ErlangPrior(beta=18.09), 30) == pytest.approx(42.539, abs=1e-3)


def test_analytic_unsupported_family():
    """Test Gaussian has no closed form."""
    with pytest.raises(UnsupportedFamilyError):
        posterior_median_analytic(GaussianPrior(mu=100, sigma=1), 10)


def test_analytic_domain_error():
    """Test analytic median rejects t <= 0."""
    with pytest.raises(DomainError):
        posterior_median_analytic(PowerLawPrior(gamma=1), 0)


def test_numeric_matches_analytic_power_law():
    """Test numeric median for gamma = 1.15 agrees with the closed form."""
    prior = PowerLawPrior(gamma=1.15)
    numeric = posterior_median_numeric(prior, 20)
    assert numeric == pytest.approx(posterior_median_analytic(prior, 20), rel=1e-3)


def test_numeric_gaussian_below_mean():
    """Test Gaussian median sits just below mu when t is far below it."""
    value = posterior_median_numeric(GaussianPrior(mu=100, sigma=1), 10)
    assert 99.9 <= value <= 100.0
    assert value == pytest.approx(99.99, abs=5e-3)


def test_numeric_gaussian_far_tail():
    """Test Gaussian median just above t when t is far above mu."""
    value = posterior_median_numeric(GaussianPrior(mu=100, sigma=1), 200)
    assert 200 < value < 200.02


@pytest.mark.parametrize("gamma", [0.5, 1, 1.15, 1.2, 2, 5])
@pytest.mark.parametrize("t", [1, 10, 100])
def test_oracle_agreement_power_law(gamma, t):
    """Test numeric and analytic power-law medians agree within 1e-3."""
    prior = PowerLawPrior(gamma=gamma)
    analytic = posterior_median_analytic(prior, t)
    assert abs(posterior_median_numeric(prior, t) - analytic) / analytic <= 1e-3


@pytest.mark.parametrize("beta", [1, 18.09, 100])
@pytest.mark.parametrize("t", [1, 30, 70])
def test_oracle_agreement_erlang(beta, t):
    """Test numeric and analytic Erlang medians agree within 1e-3."""
    prior = ErlangPrior(beta=beta)
    analytic = posterior_median_analytic(prior, t)
    assert abs(posterior_median_numeric(prior, t) - analytic) / analytic <= 1e-3


def test_numeric_degenerate_posterior():
    """Test tabulated prior with no mass above t raises."""
    prior = TabulatedPrior(support=[1.0, 5.0], density=[1.0, 1.0])
    with pytest.raises(DegeneratePosteriorError):
        posterior_median_numeric(prior, 10)


def test_numeric_tabulated_uniform():
    """Test tabulated uniform prior median against its closed form.

    For a density constant on [1, 100] the posterior is 1/x on [t, 100], whose
    median is sqrt(t * 100).
    """
    prior = TabulatedPrior(support=[1.0, 100.0], density=[1.0, 1.0])
    assert posterior_median_numeric(prior, 4) == pytest.approx(20.0, rel=1e-4)


def test_posterior_median_dispatch():
    """Test dispatcher uses the closed form where available."""
    assert posterior_median(PowerLawPrior(gamma=1), 3) == 6
    value = posterior_median(GaussianPrior(mu=100, sigma=1), 10)
    assert 99.9 <= value <= 100.0


def test_upper_limit_rules():
    """Test integration upper limits per family."""
    assert upper_limit(PowerLawPrior(gamma=1), 2, 1e-9) == pytest.approx(2e9)
    assert upper_limit(ErlangPrior(beta=1), 2, 1e-9) == pytest.approx(2 + math.log(1e9))
    assert upper_limit(GaussianPrior(mu=100, sigma=1), 10, 1e-9) == 112
    assert upper_limit(GaussianPrior(mu=100, sigma=1), 200, 1e-9) == 212


def test_prediction_curve_power_law():
    """Test gamma = 1 curve doubles every t."""
    curve = prediction_curve(PowerLawPrior(gamma=1), [1, 2, 3])
    assert curve == [
        PredictionPair(t=1, t_star=2),
        PredictionPair(t=2, t_star=4),
        PredictionPair(t=3, t_star=6),
    ]


def test_prediction_curve_erlang():
    """Test Erlang curve is a constant offset."""
    curve = prediction_curve(ErlangPrior(beta=18.09), [10, 70])
    assert [p.t for p in curve] == [10, 70]
    assert curve[0].t_star == pytest.approx(22.539, abs=1e-3)
    assert curve[1].t_star == pytest.approx(82.539, abs=1e-3)


def test_prediction_curve_empty():
    """Test empty t_values is a precondition error."""
    with pytest.raises(PreconditionError):
        prediction_curve(PowerLawPrior(gamma=1), [])


def test_prediction_curve_wraps_failure():
    """Test element failure is reported with its t."""
    prior = TabulatedPrior(support=[1.0, 5.0], density=[1.0, 1.0])
    with pytest.raises(PredictionError) as exc_info:
        prediction_curve(prior, [2, 10])
    assert exc_info.value.t == 10
    assert isinstance(exc_info.value.cause, DegeneratePosteriorError)


def test_prediction_curve_parallel_matches_serial():
    """Test thread-pool evaluation returns the same curve in input order."""
    prior = GaussianPrior(mu=22.06, sigma=13.66)
    t_values = [23, 1, 12, 5]
    serial = prediction_curve(prior, t_values)
    parallel = prediction_curve(prior, t_values, max_workers=3)
    assert parallel == serial
    assert [p.t for p in parallel] == t_values


def test_median_curve_matches_per_t():
    """Test shared-grid medians agree with individually computed ones."""
    prior = GaussianPrior(mu=78.90, sigma=9.46)
    t = np.arange(1, 101, dtype=float)
    shared = median_curve(prior, t)
    single = np.array([posterior_median_numeric(prior, x) for x in t])
    np.testing.assert_allclose(shared, single, rtol=1e-5)


def test_median_curve_far_tail_fallback(caplog):
    """Test elements with vanishing shared-grid mass are recomputed."""
    prior = GaussianPrior(mu=100, sigma=1)
    with caplog.at_level(logging.DEBUG, logger="prior_lens.priors"):
        values = median_curve(prior, [10, 200])
    assert "far-tail medians" in caplog.text
    assert 99.9 <= values[0] <= 100.0
    assert 200 < values[1] < 200.02


def test_median_curve_domain_error():
    """Test median_curve rejects non-positive t."""
    with pytest.raises(DomainError):
        median_curve(GaussianPrior(mu=10, sigma=1), [1.0, -2.0])


def test_quadrature_config_bounds():
    """Test grid settings are validated."""
    with pytest.raises(ValidationError):
        QuadratureConfig(grid_points=100)
    with pytest.raises(ValidationError):
        QuadratureConfig(tail_mass_epsilon=0.5)
