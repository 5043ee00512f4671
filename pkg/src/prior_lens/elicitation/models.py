"""Models for scenario definitions, client settings and raw query records."""
import math
from datetime import datetime
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

PLACEHOLDER = "{t}"


class ScenarioDef(BaseModel):
    """A named elicitation scenario: prompt template, t grid and units."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1, description="Short scenario name")
    prompt_template: str = Field(description="Prompt text with a single {t} placeholder")
    t_min: int = Field(gt=0)
    t_max: int = Field(gt=0)
    t_step: int = Field(1, ge=1)
    answer_marker: str = Field(min_length=1)
    units: str = ""
    non_canonical: bool = Field(
        False, description="Prompt text is known not to match the scenario"
    )

    @field_validator("prompt_template")
    @classmethod
    def _one_placeholder(cls, value: str) -> str:
        count = value.count(PLACEHOLDER)
        if count != 1:
            raise ValueError(f"template must contain exactly one {PLACEHOLDER}, found {count}")
        return value

    @model_validator(mode="after")
    def _check_range(self) -> "ScenarioDef":
        if self.t_min > self.t_max:
            raise ValueError(f"t_min {self.t_min} exceeds t_max {self.t_max}")
        return self

    @property
    def t_grid(self) -> List[int]:
        return list(range(self.t_min, self.t_max + 1, self.t_step))

    def describe_grid(self) -> str:
        return f"{self.t_min}..{self.t_max} step {self.t_step}"


class ElicitationRecord(BaseModel):
    """One raw model query and its parsed prediction."""

    model_config = ConfigDict(frozen=True)

    scenario_id: str
    t: int
    replicate: int = Field(ge=0)
    raw_response: str
    parsed_value: Optional[float] = None
    valid: bool
    model_id: str
    timestamp: datetime

    @model_validator(mode="after")
    def _valid_iff_parsed(self) -> "ElicitationRecord":
        expected = (
            self.parsed_value is not None
            and math.isfinite(self.parsed_value)
            and self.parsed_value > 0
        )
        if self.valid != expected:
            raise ValueError("valid must be true exactly when parsed_value is finite and > 0")
        return self

    @classmethod
    def from_value(cls, parsed_value: Optional[float], **fields) -> "ElicitationRecord":
        """Build a record whose validity follows from the parsed value."""
        valid = (
            parsed_value is not None
            and math.isfinite(parsed_value)
            and parsed_value > 0
        )
        return cls(parsed_value=parsed_value, valid=valid, **fields)


class ClientConfig(BaseModel):
    """Chat-completion endpoint and dispatch settings."""

    model_config = ConfigDict(frozen=True)

    endpoint_url: str = "https://api.openai.com/v1"
    model_id: str = "gpt-4"
    temperature: float = Field(0.0, ge=0)
    max_in_flight: int = Field(4, ge=1)
    retry_max: int = Field(5, ge=0)
    retry_base_delay: float = Field(1.0, ge=0, description="Seconds; doubled per retry")
    timeout: float = Field(60.0, gt=0, description="Per-request timeout in seconds")
    requests_per_minute: Optional[float] = Field(None, gt=0)
