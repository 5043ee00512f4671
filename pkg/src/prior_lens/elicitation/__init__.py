"""Prompt rendering, chat-model querying and response parsing."""

from .core import API_KEY_ENV, Elicitor, elicit
from .mock_server import ChatScript, ScriptedChatServer
from .models import ClientConfig, ElicitationRecord, ScenarioDef
from .parsing import parse_response
from .rate_limit import RateLimiter
from .scenarios import BUILTIN_SCENARIOS, REFERENCE_PRIORS, load_scenarios, render_prompt

__all__ = [
    "API_KEY_ENV",
    "BUILTIN_SCENARIOS",
    "REFERENCE_PRIORS",
    "ChatScript",
    "ClientConfig",
    "ElicitationRecord",
    "Elicitor",
    "RateLimiter",
    "ScenarioDef",
    "ScriptedChatServer",
    "elicit",
    "load_scenarios",
    "parse_response",
    "render_prompt",
]
