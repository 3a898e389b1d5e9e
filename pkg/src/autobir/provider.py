"""Text completion providers.

The pipeline only needs one call: prompt in, free text out. ScriptedProvider
replays canned responses for offline tests and records every prompt it was
given so assertions can inspect exactly what the model saw.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Protocol

import requests

from .errors import ProviderError, ScriptExhaustedError


class LLMProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


class ScriptedProvider:
    """Deterministic provider: pops responses in order, remembers prompts."""

    def __init__(self, responses: list[str] | None = None) -> None:
        self._responses = list(responses or [])
        self.prompts: list[str] = []

    def push(self, *responses: str) -> None:
        self._responses.extend(responses)

    @property
    def remaining(self) -> int:
        return len(self._responses)

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if not self._responses:
            raise ScriptExhaustedError(
                f"script exhausted after {len(self.prompts) - 1} responses"
            )
        return self._responses.pop(0)


def load_script(path: Path | str) -> ScriptedProvider:
    """Read a JSON array of response strings into a ScriptedProvider."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list) or not all(isinstance(r, str) for r in raw):
        raise ProviderError(f"script {path} must be a JSON array of strings")
    return ScriptedProvider(raw)


class HttpProvider:
    """POSTs {"prompt": ...} to an endpoint, expects {"text": ...} back."""

    def __init__(self, endpoint: str, timeout_s: float = 120.0) -> None:
        self.endpoint = endpoint
        self.timeout_s = timeout_s

    def complete(self, prompt: str) -> str:
        try:
            resp = requests.post(
                self.endpoint, json={"prompt": prompt}, timeout=self.timeout_s
            )
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"completion request failed: {exc}") from exc
        except ValueError as exc:
            raise ProviderError(f"completion response was not JSON: {exc}") from exc
        text = payload.get("text")
        if not isinstance(text, str):
            raise ProviderError("completion response missing 'text' field")
        return text
