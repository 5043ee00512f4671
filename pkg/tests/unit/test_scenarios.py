"""Unit tests for scenario definitions, prompt rendering and response parsing."""
import numpy as np
import pytest
from pydantic import ValidationError

from conftest import DATA_DIR
from prior_lens.elicitation import (
    BUILTIN_SCENARIOS,
    REFERENCE_PRIORS,
    ScenarioDef,
    load_scenarios,
    parse_response,
    render_prompt,
)
from prior_lens.utils.errors import DataFormatError, ScenarioRangeError


def test_builtin_scenarios():
    """Test the eight built-in scenarios and their grids."""
    assert sorted(BUILTIN_SCENARIOS) == [
        "cakes",
        "lifespans",
        "movie_grosses",
        "movie_runtimes",
        "pharaohs",
        "poems",
        "representatives",
        "waiting_times",
    ]
    assert len(BUILTIN_SCENARIOS["cakes"].t_grid) == 61
    assert BUILTIN_SCENARIOS["poems"].t_grid[0] == 2
    assert BUILTIN_SCENARIOS["lifespans"].non_canonical
    assert not BUILTIN_SCENARIOS["cakes"].non_canonical
    assert set(REFERENCE_PRIORS) <= set(BUILTIN_SCENARIOS)


def test_render_cakes():
    """Test cakes prompt substitution."""
    prompt = render_prompt(BUILTIN_SCENARIOS["cakes"], 10)
    assert "has been baking for 10 minutes" in prompt
    assert prompt.endswith("Predicted_number_of_minutes=")
    assert "{t}" not in prompt


def test_render_poem():
    """Test poem prompt substitution."""
    assert "line 2 of a poem" in render_prompt(BUILTIN_SCENARIOS["poems"], 2)


def test_render_out_of_range():
    """Test t below the grid is rejected."""
    with pytest.raises(ScenarioRangeError):
        render_prompt(BUILTIN_SCENARIOS["cakes"], 9)


def test_render_injective():
    """Test every grid point renders to a distinct prompt."""
    for scenario in BUILTIN_SCENARIOS.values():
        prompts = [render_prompt(scenario, t) for t in scenario.t_grid]
        assert len(set(prompts)) == len(prompts)
        assert render_prompt(scenario, scenario.t_min) == prompts[0]


@pytest.mark.parametrize(
    "template", ["no placeholder here", "{t} and again {t}"]
)
def test_scenario_needs_one_placeholder(template):
    """Test templates must hold exactly one placeholder."""
    with pytest.raises(ValidationError):
        ScenarioDef(id="x", prompt_template=template, t_min=1, t_max=2, answer_marker="=")


def test_scenario_range_order():
    """Test t_min may not exceed t_max."""
    with pytest.raises(ValidationError):
        ScenarioDef(id="x", prompt_template="{t}", t_min=5, t_max=2, answer_marker="=")


def test_load_scenarios_override():
    """Test a scenario file replaces and extends the built-ins."""
    scenarios = load_scenarios(DATA_DIR / "scenarios_override.yaml")
    assert "year old man" in scenarios["lifespans"].prompt_template
    assert not scenarios["lifespans"].non_canonical
    assert scenarios["queue_length"].t_grid == [1, 3, 5, 7, 9, 11, 13, 15, 17, 19]
    assert scenarios["cakes"] == BUILTIN_SCENARIOS["cakes"]


def test_load_scenarios_bad_file(tmp_path):
    """Test malformed scenario files raise a format error."""
    path = tmp_path / "bad.yaml"
    path.write_text("cakes: 1\n")
    with pytest.raises(DataFormatError):
        load_scenarios(path)
    path.write_text("- id: broken\n  t_min: 1\n")
    with pytest.raises(DataFormatError):
        load_scenarios(path)


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Predicted_number_of_minutes= 45", 45),
        ("I'd guess 1,200 minutes total", 1200),
        ("Predicted_number_of_years= 20 to 30", 25),
        ("Predicted_number_of_years= 20-30", 25),
        ("Predicted_number_of_years=12.5", 12.5),
        ("At 4000 BC... Predicted_number_of_years= 33 years", 33),
        ("Predicted_number_of_years=\n\n 2.5e3", 2500),
        ("Predicted_number_of_minutes= -5", -5),
        ("Predicted_number_of_minutes=-12.5", -12.5),
        ("A mid-40 minute bake, Predicted_number_of_minutes= 40", 40),
        ("Somewhere in the mid-40s", 40),
    ],
)
def test_parse_response(raw, expected):
    """Test numeric extraction from replies."""
    marker = "Predicted_number_of_years=" if "years" in raw else "Predicted_number_of_minutes="
    assert parse_response(raw, marker) == expected


def test_parse_response_no_number():
    """Test replies without digits parse to None."""
    assert parse_response("I cannot say.", "Predicted_number_of_minutes=") is None


def test_parse_response_last_marker_wins():
    """Test the number after the last marker is taken."""
    raw = "Predicted_number_of_minutes= 30\nOn reflection, Predicted_number_of_minutes= 40"
    assert parse_response(raw, "Predicted_number_of_minutes=") == 40


def test_parse_canonical_decimals():
    """Test any value with six significant digits survives rendering and parsing."""
    rng = np.random.default_rng(3)
    marker = "Predicted_number_of_minutes="
    for _ in range(1000):
        x = float(f"{10 ** rng.uniform(-3, 7):.6g}")
        assert parse_response(f"{marker} {x:.6g}", marker) == x
