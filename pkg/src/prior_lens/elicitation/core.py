"""Batch elicitation of predictions from a chat-completion endpoint."""
import asyncio
import logging
import os
from datetime import datetime, timezone
from typing import Callable, List, Optional

import backoff
import openai
from openai import AsyncOpenAI

from prior_lens.utils.errors import AuthenticationFailure, EmptyCompletionError

from .models import ClientConfig, ElicitationRecord, ScenarioDef
from .parsing import parse_response
from .rate_limit import RateLimiter
from .scenarios import render_prompt

API_KEY_ENV = "PRIOR_LENS_API_KEY"

logger = logging.getLogger("prior_lens.elicitation")

# 429, 5xx, timeouts and dropped connections are worth another attempt.
RETRYABLE_ERRORS = (
    openai.RateLimitError,
    openai.InternalServerError,
    openai.APIConnectionError,
)
FATAL_ERRORS = (openai.AuthenticationError, openai.PermissionDeniedError)


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class Elicitor:
    """Queries a chat model over a scenario's t grid and parses its predictions."""

    def __init__(
        self,
        config: ClientConfig,
        api_key: Optional[str] = None,
        client: Optional[AsyncOpenAI] = None,
        clock: Callable[[], datetime] = _utc_now,
    ):
        """Initialize the elicitor.

        Args:
            config: Endpoint, model and dispatch settings
            api_key: Bearer credential (defaults to PRIOR_LENS_API_KEY)
            client: Optional pre-configured AsyncOpenAI client for testing
            clock: Source of record timestamps

        Raises:
            AuthenticationFailure: If no credential is available
        """
        self.config = config
        self.retries = 0
        self._clock = clock
        if client is None:
            api_key = api_key or os.getenv(API_KEY_ENV)
            if not api_key:
                raise AuthenticationFailure(f"{API_KEY_ENV} is not set")
            client = AsyncOpenAI(
                api_key=api_key,
                base_url=config.endpoint_url,
                timeout=config.timeout,
                max_retries=0,
            )
        self._client = client
        self._send = backoff.on_exception(
            backoff.expo,
            RETRYABLE_ERRORS,
            max_tries=config.retry_max + 1,
            factor=config.retry_base_delay,
            jitter=backoff.full_jitter,
            on_backoff=self._log_retry,
            logger=None,
        )(self._complete)

    def _log_retry(self, details) -> None:
        self.retries += 1
        logger.warning(
            f"Retrying request (attempt {details['tries']}) in {details['wait']:.2f}s "
            f"after {type(details['exception']).__name__}: {details['exception']}"
        )

    async def _complete(self, prompt: str) -> str:
        response = await self._client.chat.completions.create(
            model=self.config.model_id,
            temperature=self.config.temperature,
            messages=[{"role": "user", "content": prompt}],
        )
        if not response.choices:
            raise EmptyCompletionError("reply held no choices")
        return response.choices[0].message.content or ""

    async def query(self, scenario: ScenarioDef, t: int, replicate: int) -> ElicitationRecord:
        """Send one prompt and turn the reply into a record.

        Exhausted retries and non-retryable request errors produce an invalid
        record carrying the error text; authentication errors propagate.
        """
        prompt = render_prompt(scenario, t)
        try:
            raw = await self._send(prompt)
            value = parse_response(raw, scenario.answer_marker)
        except FATAL_ERRORS as e:
            raise AuthenticationFailure(f"endpoint rejected credential: {e}") from e
        except (openai.OpenAIError, EmptyCompletionError) as e:
            logger.error(f"Request for {scenario.id} t={t} #{replicate} failed: {e}")
            raw, value = f"ERROR: {type(e).__name__}: {e}", None

        if value is None:
            logger.info(f"No prediction parsed for {scenario.id} t={t} #{replicate}")
        return ElicitationRecord.from_value(
            value,
            scenario_id=scenario.id,
            t=t,
            replicate=replicate,
            raw_response=raw,
            model_id=self.config.model_id,
            timestamp=self._clock(),
        )

    async def run(self, scenario: ScenarioDef, replicates: int = 1) -> List[ElicitationRecord]:
        """Query every (t, replicate) of the scenario grid.

        Returns:
            One record per (t, replicate), sorted by (t, replicate)

        Raises:
            ValueError: If replicates < 1
            AuthenticationFailure: On the first credential rejection; pending
                requests are cancelled
        """
        if replicates < 1:
            raise ValueError("replicates must be >= 1")
        limiter = RateLimiter(self.config.requests_per_minute)
        gate = asyncio.Semaphore(self.config.max_in_flight)

        async def one(t: int, replicate: int) -> ElicitationRecord:
            async with gate:
                await limiter.acquire()
                return await self.query(scenario, t, replicate)

        jobs = [(t, r) for t in scenario.t_grid for r in range(replicates)]
        logger.info(
            f"Eliciting {scenario.id}: {len(jobs)} queries to {self.config.model_id}"
        )
        tasks = [asyncio.ensure_future(one(t, r)) for t, r in jobs]
        try:
            records = await asyncio.gather(*tasks)
        except BaseException:
            for task in tasks:
                task.cancel()
            await asyncio.gather(*tasks, return_exceptions=True)
            raise

        valid = sum(record.valid for record in records)
        logger.info(f"Elicited {scenario.id}: {valid} valid, {len(records) - valid} invalid")
        return sorted(records, key=lambda record: (record.t, record.replicate))


def elicit(
    scenario: ScenarioDef,
    cfg: ClientConfig,
    replicates: int = 1,
    client: Optional[AsyncOpenAI] = None,
) -> List[ElicitationRecord]:
    """Synchronous wrapper around ``Elicitor.run``."""
    return asyncio.run(Elicitor(cfg, client=client).run(scenario, replicates))
