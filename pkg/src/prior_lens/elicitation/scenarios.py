"""Built-in everyday-prediction scenarios and prompt rendering.

Scenario files (YAML, a list of ScenarioDef mappings) are merged over the
built-ins by id, so a prompt can be corrected without touching code.
"""
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import yaml
from pydantic import ValidationError

from prior_lens.priors import ErlangPrior, GaussianPrior, PowerLawPrior, PriorSpec
from prior_lens.utils.errors import DataFormatError, ScenarioRangeError

from .models import PLACEHOLDER, ScenarioDef

logger = logging.getLogger("prior_lens.elicitation")

INSTRUCTIONS = (
    "Each of the questions below asks you to predict something, either a duration "
    "or a quantity, based on a single piece of information. Please read each "
    "question and respond only with your prediction on the line below it. We're "
    "interested in your intuitions, so please don't make complicated calculations; "
    "just tell us what you think! "
)

_MOVIE_GROSSES_QUESTION = (
    "Imagine you hear about a movie that has taken in {t} million dollars at the box "
    "office, but don't know how long it has been running. What would you predict for "
    "the total amount of box office intake for that movie? "
)


def _scenario(id: str, question: str, marker: str, t_min: int, t_max: int,
              units: str, non_canonical: bool = False) -> ScenarioDef:
    return ScenarioDef(
        id=id,
        prompt_template=INSTRUCTIONS + question + marker,
        t_min=t_min,
        t_max=t_max,
        t_step=1,
        answer_marker=marker,
        units=units,
        non_canonical=non_canonical,
    )


BUILTIN_SCENARIOS: Dict[str, ScenarioDef] = {
    s.id: s
    for s in (
        _scenario(
            "cakes",
            "Imagine you are in somebody's kitchen and notice that a cake is in the "
            "oven. The timer shows that it has been baking for {t} minutes. What would "
            "you predict for the total amount of times the cake needs to bake? ",
            "Predicted_number_of_minutes=", 10, 70, "minutes",
        ),
        # The known lifespans prompt repeats the movie-grosses question; kept as is.
        _scenario(
            "lifespans", _MOVIE_GROSSES_QUESTION,
            "Predicted_number_of_million_dollars=", 1, 100, "years",
            non_canonical=True,
        ),
        _scenario(
            "movie_grosses", _MOVIE_GROSSES_QUESTION,
            "Predicted_number_of_million_dollars=", 1, 100, "million dollars",
        ),
        _scenario(
            "movie_runtimes",
            "If you made a surprise visit to a friend, and found that they had been "
            "watching a movie for {t} minutes, what would you predict for the length "
            "of the movie? ",
            "Predicted_number_of_minutes=", 30, 110, "minutes",
        ),
        _scenario(
            "poems",
            "If your friend read you her favorite line of poetry, and told you it was "
            "line {t} of a poem, what would you predict for the total length of the "
            "poem? ",
            "Predicted_number_of_lines=", 2, 67, "lines",
        ),
        _scenario(
            "pharaohs",
            "If you opened a book about the history of ancient Egypt to a page listing "
            "the reigns of the pharaohs, and noticed that at 4000 BC a particular "
            "pharaoh had been ruling for {t} years, what would you predict for the "
            "total duration of his reign? ",
            "Predicted_number_of_years=", 1, 23, "years",
        ),
        _scenario(
            "representatives",
            "If you heard a member of the U.S. House of Representative had served for "
            "{t} years, what would you predict his total in the House would be? ",
            "Predicted_number_of_years=", 1, 31, "years",
        ),
        _scenario(
            "waiting_times",
            "If you were calling a telephone box office to book tickets and had been "
            "on hold for {t} minutes, what would you predict for the total time you "
            "would be on hold? ",
            "Predicted_number_of_minutes=", 1, 23, "minutes",
        ),
    )
}

# Implicit priors previously recovered from GPT-4 responses on these scenarios.
REFERENCE_PRIORS: Dict[str, PriorSpec] = {
    "cakes": ErlangPrior(beta=18.09),
    "lifespans": GaussianPrior(mu=78.90, sigma=9.46),
    "movie_grosses": PowerLawPrior(gamma=1.20),
    "movie_runtimes": GaussianPrior(mu=111.19, sigma=36.72),
    "poems": PowerLawPrior(gamma=1.15),
    "pharaohs": GaussianPrior(mu=22.06, sigma=13.66),
    "representatives": GaussianPrior(mu=11.37, sigma=5.02),
}


def load_scenarios(path: Optional[Union[str, Path]] = None) -> Dict[str, ScenarioDef]:
    """Built-in scenarios, overridden or extended by a YAML scenario file.

    Raises:
        DataFormatError: If the file is not a list of valid scenario mappings
    """
    scenarios = dict(BUILTIN_SCENARIOS)
    if path is None:
        return scenarios
    with open(path, encoding="utf-8") as f:
        entries = yaml.safe_load(f) or []
    if not isinstance(entries, list):
        raise DataFormatError(f"{path}: expected a list of scenarios")
    for entry in entries:
        try:
            scenario = ScenarioDef.model_validate(entry)
        except ValidationError as e:
            raise DataFormatError(f"{path}: invalid scenario: {e}") from e
        if scenario.id in scenarios:
            logger.info(f"Scenario '{scenario.id}' overridden from {path}")
        scenarios[scenario.id] = scenario
    return scenarios


def render_prompt(scenario: ScenarioDef, t: int) -> str:
    """Template text with {t} replaced by the decimal rendering of t.

    Raises:
        ScenarioRangeError: If t lies outside [t_min, t_max]
    """
    if not scenario.t_min <= t <= scenario.t_max:
        raise ScenarioRangeError(
            f"t={t} outside {scenario.id} range {scenario.t_min}..{scenario.t_max}"
        )
    return scenario.prompt_template.replace(PLACEHOLDER, str(int(t)))
