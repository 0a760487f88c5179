"""Completion backends: an HTTP chat-completion client and an offline mock.

The wire format is the common chat-completion JSON shape: request
``{model, messages: [{role, content}, ...], temperature, top_p}``, response
``choices[0].message.content``. The API key is read from an environment
variable, never from configuration files.
"""

from __future__ import annotations

import json
import os
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

import requests

from ..errors import AdapterError
from .decode import DecodingConfig

DEFAULT_TIMEOUT_SECONDS = 120.0
TRANSPORT_RETRIES = 2


class LlmAdapter(ABC):
    """Stateless completion function: (system_text, user_text, config) -> text.

    Implementations must be safe to call from multiple threads at once and
    must not carry memory between calls.
    """

    @abstractmethod
    def complete(self, system_text: str, user_text: str, config: DecodingConfig) -> str:
        raise NotImplementedError


class MockAdapter(LlmAdapter):
    """Deterministic scripted adapter for offline runs.

    Responses are consumed in order under a lock; by default the script
    cycles when exhausted. With concurrent callers the response-to-caller
    assignment follows acquisition order, so per-call pairing can vary with
    scheduling while the consumed multiset stays fixed.
    """

    def __init__(self, responses: Sequence[str], cycle: bool = True):
        if not responses:
            raise ValueError("MockAdapter needs at least one scripted response")
        self._responses = list(responses)
        self._cycle = cycle
        self._lock = threading.Lock()
        self._index = 0
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path, cycle: bool = True) -> "MockAdapter":
        """Load scripted responses from a JSON array (.json) or JSON-lines file."""
        p = Path(path)
        text = p.read_text(encoding="utf-8")
        if p.suffix == ".jsonl":
            responses = [json.loads(line) for line in text.splitlines() if line.strip()]
        else:
            responses = json.loads(text)
        if not isinstance(responses, list) or not all(isinstance(r, str) for r in responses):
            raise ValueError(f"{p} must contain a list of response strings")
        return cls(responses, cycle=cycle)

    def complete(self, system_text: str, user_text: str, config: DecodingConfig) -> str:
        with self._lock:
            if self._index >= len(self._responses):
                if not self._cycle:
                    raise AdapterError(None, "mock script exhausted")
                self._index = 0
            response = self._responses[self._index]
            self._index += 1
            self.calls += 1
        return response


class HttpChatAdapter(LlmAdapter):
    """Chat-completion client with timeout and exponential transport backoff."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "OPENAI_API_KEY",
        timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS,
        transport_retries: int = TRANSPORT_RETRIES,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout_seconds = timeout_seconds
        self.transport_retries = transport_retries
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, system_text: str, user_text: str, config: DecodingConfig) -> str:
        messages = []
        if system_text:
            messages.append({"role": "system", "content": system_text})
        messages.append({"role": "user", "content": user_text})
        payload = {
            "model": self.model,
            "messages": messages,
            "temperature": config.temperature,
            "top_p": config.top_p,
        }
        last_error: Exception | None = None
        for attempt in range(self.transport_retries + 1):
            if attempt:
                time.sleep(2.0 ** (attempt - 1))
            try:
                response = self._session.post(
                    self.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.timeout_seconds,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                raise AdapterError(response.status_code, response.text[:500])
            try:
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise AdapterError(response.status_code, f"malformed response body: {exc}") from exc
        raise AdapterError(None, f"transport failed after retries: {last_error}")


@dataclass
class TranscriptEntry:
    """One logged completion exchange."""

    timestamp: float
    kind: str
    payload: dict[str, Any]


class TranscriptWriter:
    """Append-only JSON-lines log of raw requests and responses, for replay."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def record(self, kind: str, payload: dict[str, Any]) -> None:
        entry = TranscriptEntry(timestamp=time.time(), kind=kind, payload=payload)
        line = json.dumps(asdict(entry), ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
