"""Scripted chat-completion server for offline runs and tests.

The server speaks the same wire format as the real endpoint and plugs into
``openai.AsyncOpenAI`` as an ``httpx.MockTransport``. A JSON script drives it::

    {
      "t_pattern": "baking for (\\\\d+) minutes",
      "api_key": "test-key",
      "steps": [
        {"status": 429},
        {"status": 200, "content": "Predicted_number_of_minutes= {2t}"}
      ]
    }

Every distinct prompt walks through ``steps`` on successive requests; the last
step repeats. ``{t}`` and ``{2t}`` in a step's content are replaced by the t
extracted from the prompt with ``t_pattern`` (default: first integer). A step
with ``"filtered": true`` answers 200 with an empty ``choices`` list.
"""
import asyncio
import json
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import httpx
from openai import AsyncOpenAI
from pydantic import BaseModel, Field

MOCK_BASE_URL = "http://mock-chat.local/v1"


class ScriptStep(BaseModel):
    """One scripted reply."""

    status: int = 200
    content: str = ""
    filtered: bool = Field(False, description="Reply with an empty choices list")


class ChatScript(BaseModel):
    """Replies the scripted server gives, per distinct prompt."""

    t_pattern: str = r"(\d+)"
    api_key: Optional[str] = None
    delay_scale: float = Field(
        0.0, ge=0, description="Each reply is held delay_scale / t seconds"
    )
    steps: List[ScriptStep] = Field(min_length=1)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ChatScript":
        with open(path, encoding="utf-8") as f:
            return cls.model_validate(json.load(f))


def _format_number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


class ScriptedChatServer:
    """Answers chat-completion requests according to a ChatScript."""

    def __init__(self, script: ChatScript):
        self.script = script
        self._pattern = re.compile(script.t_pattern)
        self._cursor: Dict[str, int] = {}
        self.requests: List[Dict[str, Any]] = []
        self.statuses: List[int] = []

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScriptedChatServer":
        return cls(ChatScript.load(path))

    def _error(self, status: int, message: str) -> httpx.Response:
        self.statuses.append(status)
        return httpx.Response(
            status, json={"error": {"message": message, "type": "mock_error", "code": status}}
        )

    async def handle(self, request: httpx.Request) -> httpx.Response:
        """Reply to one HTTP request."""
        await request.aread()
        if self.script.api_key is not None:
            expected = f"Bearer {self.script.api_key}"
            if request.headers.get("authorization") != expected:
                return self._error(401, "invalid api key")
        if request.method != "POST" or not request.url.path.endswith("/chat/completions"):
            return self._error(404, f"no route for {request.method} {request.url.path}")

        body = json.loads(request.content)
        self.requests.append(body)
        prompt = body["messages"][-1]["content"]
        position = self._cursor.get(prompt, 0)
        self._cursor[prompt] = position + 1
        step = self.script.steps[min(position, len(self.script.steps) - 1)]
        match = self._pattern.search(prompt)
        if match is not None and self.script.delay_scale:
            await asyncio.sleep(self.script.delay_scale / float(match.group(1)))
        if step.status != 200:
            return self._error(step.status, f"scripted status {step.status}")

        content = step.content
        if match is not None:
            t = float(match.group(1))
            content = content.replace("{2t}", _format_number(2 * t))
            content = content.replace("{t}", _format_number(t))
        self.statuses.append(200)
        choices = [] if step.filtered else [
            {
                "index": 0,
                "message": {"role": "assistant", "content": content},
                "finish_reason": "stop",
            }
        ]
        return httpx.Response(
            200,
            json={
                "id": f"chatcmpl-mock-{len(self.requests)}",
                "object": "chat.completion",
                "created": 0,
                "model": body.get("model", "mock"),
                "choices": choices,
                "usage": {"prompt_tokens": 0, "completion_tokens": 0, "total_tokens": 0},
            },
        )

    def transport(self) -> httpx.MockTransport:
        return httpx.MockTransport(self.handle)

    def client(self, api_key: str, timeout: float = 60.0) -> AsyncOpenAI:
        """An AsyncOpenAI client whose traffic this server answers."""
        return AsyncOpenAI(
            api_key=api_key,
            base_url=MOCK_BASE_URL,
            timeout=timeout,
            max_retries=0,
            http_client=httpx.AsyncClient(transport=self.transport()),
        )
