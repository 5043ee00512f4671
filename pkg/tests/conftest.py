"""Shared fixtures for prior_lens tests."""
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import List

import numpy as np
import pytest

from prior_lens.elicitation import ScenarioDef
from prior_lens.priors import PredictionPair, PriorSpec, QuadratureConfig, median_curve

DATA_DIR = Path(__file__).parent / "data"
SCRIPTS_DIR = DATA_DIR / "scripts"
GOLDEN_DIR = DATA_DIR / "golden"
FIXED_TIME = datetime(2024, 1, 2, 3, 4, 5, tzinfo=timezone.utc)


def synthetic_pairs(prior: PriorSpec, t_values, cfg: QuadratureConfig = None) -> List[PredictionPair]:
    """Noiseless (t, t*) pairs on the prior's prediction function."""
    t = np.asarray(list(t_values), dtype=float)
    t_star = median_curve(prior, t, cfg)
    return [PredictionPair(t=float(a), t_star=float(b)) for a, b in zip(t, t_star)]


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Run every test in an empty directory with no PRIOR_LENS_* or SOURCE_DATE_EPOCH variables."""
    for key in list(os.environ):
        if key.startswith("PRIOR_LENS_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    monkeypatch.chdir(tmp_path)
    yield


@pytest.fixture
def fast_cfg():
    """Coarser quadrature grid for tests that run many Gaussian fits."""
    return QuadratureConfig(grid_points=4097)


@pytest.fixture
def tiny_scenario():
    """Three-point scenario for quick elicitation runs."""
    return ScenarioDef(
        id="tiny",
        prompt_template="The oven timer reads {t} minutes. Predicted_number_of_minutes=",
        t_min=1,
        t_max=3,
        answer_marker="Predicted_number_of_minutes=",
        units="minutes",
    )
