"""Chat-completions backend for a hosted language model.

The wire format is the common chat shape: POST ``{endpoint}`` with
``{"model": ..., "messages": [{"role", "content"}...], "temperature": 0}``
and a bearer token read from the configured environment variable; the reply
text is ``choices[0].message.content``.  Field names are documented in
docs/http_api.md and hidden behind :class:`BackendConfig`.
"""

from __future__ import annotations

import os
import time

import requests

from ..terms import serialize
from .backend import (
    BackendConfig,
    BackendTimeoutError,
    BackendUnavailableError,
    RealizeRequest,
    UnderstandRequest,
)

_UNDERSTAND_INSTRUCTIONS = (
    "You translate one user utterance into ground predicate terms.\n"
    "Reply with predicates only, no prose. Use exactly the functors, slots,"
    " and values in scope below; reply with an empty string when nothing in"
    " the utterance maps to them.\n"
)

_REALIZE_INSTRUCTIONS = (
    "You turn predicate instructions into one short, natural reply to the"
    " user. Mention every entity name and attribute value verbatim. Do not"
    " add facts of your own.\n"
)


class LiveBackend:
    def __init__(self, config: BackendConfig):
        if not config.endpoint:
            raise BackendUnavailableError("live backend needs an endpoint URL")
        self.config = config

    def _credential(self) -> str:
        value = os.environ.get(self.config.credential_env, "")
        if not value:
            raise BackendUnavailableError(
                f"credential environment variable {self.config.credential_env} is not set"
            )
        return value

    def _complete(self, messages: list[dict]) -> str:
        payload = {"model": self.config.model, "messages": messages, "temperature": 0}
        headers = {"Authorization": f"Bearer {self._credential()}"}
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                response = requests.post(
                    self.config.endpoint, json=payload, headers=headers, timeout=self.config.timeout
                )
            except requests.Timeout as err:
                raise BackendTimeoutError(str(err)) from err
            except requests.RequestException as err:
                last_error = err
                time.sleep(min(2 ** attempt, 8))
                continue
            if response.status_code == 200:
                try:
                    return response.json()["choices"][0]["message"]["content"]
                except (KeyError, IndexError, ValueError) as err:
                    raise BackendUnavailableError(f"malformed completion response: {err}") from err
            if response.status_code in (429, 500, 502, 503):
                last_error = BackendUnavailableError(f"HTTP {response.status_code}")
                time.sleep(min(2 ** attempt, 8))
                continue
            raise BackendUnavailableError(f"HTTP {response.status_code}: {response.text[:200]}")
        raise BackendUnavailableError(f"giving up after retries: {last_error}")

    def understand_text(self, req: UnderstandRequest) -> str:
        system = _UNDERSTAND_INSTRUCTIONS + "\nScope:\n" + req.ontology_summary
        messages = [{"role": "system", "content": system}]
        for utterance, predicates in req.examples:
            messages.append({"role": "user", "content": utterance})
            messages.append({"role": "assistant", "content": predicates})
        for speaker, text in req.context:
            messages.append({"role": "user", "content": f"[context] {speaker}: {text}"})
        content = req.utterance
        if req.repair:
            content += f"\n\n[your previous output was rejected: {req.repair}; output corrected predicates only]"
        messages.append({"role": "user", "content": content})
        return self._complete(messages)

    def realize_text(self, req: RealizeRequest) -> str:
        system = _REALIZE_INSTRUCTIONS + f"\nStyle: {req.persona or 'neutral'}"
        instruction = serialize(req.predicates, "concierge")
        if req.context:
            notes = "\n".join(f"{k}: {v}" for k, v in req.context.items())
            instruction += f"\n\nBackground you may draw on:\n{notes}"
        return self._complete(
            [
                {"role": "system", "content": system},
                {"role": "user", "content": instruction},
            ]
        )
