"""Configuration management for prior_lens."""
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from prior_lens.elicitation.models import ClientConfig
from prior_lens.fitting.models import FitOptions
from prior_lens.priors.models import QuadratureConfig
from prior_lens.utils.errors import AuthenticationFailure, DataFormatError


class Settings(BaseSettings):
    """prior_lens configuration settings.

    Values come from PRIOR_LENS_* environment variables or a .env file; a YAML
    config file passed to get_settings overrides both.
    """

    # Endpoint Configuration
    api_key: Optional[str] = None
    endpoint_url: str = "https://api.openai.com/v1"
    model_id: str = "gpt-4"
    temperature: float = Field(0.0, ge=0)
    max_in_flight: int = Field(4, ge=1)
    retry_max: int = Field(5, ge=0)
    retry_base_delay: float = Field(1.0, ge=0)
    timeout: float = Field(60.0, gt=0)
    requests_per_minute: Optional[float] = Field(None, gt=0)
    replicates: int = Field(1, ge=1)

    # Quadrature and Fitting
    grid_points: int = Field(32769, ge=1025)
    tail_mass_epsilon: float = Field(1e-9, gt=0, lt=1e-3)
    simplex_tolerance: float = Field(1e-6, gt=0)
    max_evaluations: int = Field(20000, ge=100)
    replicate_aggregation: Literal["median", "mean", "none"] = "median"

    # Files and Logging
    scenarios_file: Optional[Path] = None
    log_level: str = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="PRIOR_LENS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def require_api_key(self) -> str:
        """The API key, or AuthenticationFailure when it is not configured."""
        if not self.api_key:
            raise AuthenticationFailure("PRIOR_LENS_API_KEY is required but not provided")
        return self.api_key

    def client_config(self) -> ClientConfig:
        return ClientConfig(
            endpoint_url=self.endpoint_url,
            model_id=self.model_id,
            temperature=self.temperature,
            max_in_flight=self.max_in_flight,
            retry_max=self.retry_max,
            retry_base_delay=self.retry_base_delay,
            timeout=self.timeout,
            requests_per_minute=self.requests_per_minute,
        )

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig(
            grid_points=self.grid_points, tail_mass_epsilon=self.tail_mass_epsilon
        )

    def fit_options(self) -> FitOptions:
        return FitOptions(
            simplex_tolerance=self.simplex_tolerance,
            max_evaluations=self.max_evaluations,
            replicate_aggregation=self.replicate_aggregation,
        )

    def effective_config(self) -> Dict[str, Any]:
        """Settings without the credential, for manifests and hashing."""
        return self.model_dump(mode="json", exclude={"api_key"})


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a YAML mapping of setting names to values."""
    with open(path, encoding="utf-8") as f:
        values = yaml.safe_load(f) or {}
    if not isinstance(values, dict):
        raise DataFormatError(f"{path}: config file must hold a mapping")
    return {str(key).replace("-", "_"): value for key, value in values.items()}


# Do not initialize at import time so tests can control the environment
def get_settings(config_file: Optional[Union[str, Path]] = None) -> Settings:
    """Get settings instance with validation."""
    overrides = load_config_file(config_file) if config_file else {}
    return Settings(**overrides)
