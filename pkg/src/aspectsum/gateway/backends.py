"""Model backends: a deterministic mock and an HTTP chat-completion adapter."""

from __future__ import annotations

import json
import os
import re
import threading
from importlib import resources
from pathlib import Path
from typing import Optional

import httpx

from .core import AttemptTimeout, LlmCall, TransientError
from .errors import AuthFailure, GatewayConfigError
from .templates import TemplateId

_REVIEW_MARKER = "\nReview:\n"
_ASPECTS_MARKER = "\nAspects:\n"
_ASPECT_HEADER_RE = re.compile(
    r"^Aspect: (.+?) \((positive|negative|mixed)\), mentioned in (\d+) reviews?$",
    re.MULTILINE,
)

API_KEY_ENV = "LLM_API_KEY"


def _load_rules(rules_path: Optional[str | Path]) -> dict:
    if rules_path is not None:
        return json.loads(Path(rules_path).read_text(encoding="utf-8"))
    return json.loads(
        resources.files("aspectsum").joinpath("data", "mock_rules.json").read_text("utf-8")
    )


class MockBackend:
    """Deterministic stand-in for a hosted model.

    A pure function of (template_id, rendered prompt): extraction matches a
    fixed keyword table against the review text, consolidation applies a
    fixed raw-to-canonical table, and summarization emits sentences derived
    from the prompt's aspect headers, padded into the 300-500 character
    window. The rule set lives in a JSON fixture so golden tests stay stable.
    """

    backend_id = "mock"

    def __init__(self, rules_path: Optional[str | Path] = None) -> None:
        rules = _load_rules(rules_path)
        self.malformed_marker: str = rules["malformed_marker"]
        self.extraction_rules: list[dict] = rules["extraction_rules"]
        self.consolidation_map: dict[str, str] = rules["consolidation_map"]
        self.summary_sentences: dict[str, str] = rules["summary_sentences"]
        self.summary_fillers: list[str] = rules["summary_fillers"]

    def send(self, call: LlmCall) -> str:
        if call.template_id is TemplateId.ASPECT_EXTRACTION:
            return self._extract(call.rendered_prompt)
        if call.template_id is TemplateId.ASPECT_CONSOLIDATION:
            return self._consolidate(call.rendered_prompt)
        return self._summarize(call.rendered_prompt)

    def _extract(self, prompt: str) -> str:
        marker = prompt.rfind(_REVIEW_MARKER)
        review_text = prompt[marker + len(_REVIEW_MARKER) :] if marker != -1 else ""
        if self.malformed_marker in review_text:
            return 'I am sorry, here is some text that is {"aspects": not json'
        haystack = review_text.casefold()
        aspects = [
            {"aspect": rule["aspect"], "sentiment": rule["sentiment"]}
            for rule in self.extraction_rules
            if rule["keyword"] in haystack
        ]
        return json.dumps({"aspects": aspects})

    def _consolidate(self, prompt: str) -> str:
        marker = prompt.rfind(_ASPECTS_MARKER)
        block = prompt[marker + len(_ASPECTS_MARKER) :] if marker != -1 else ""
        mappings = []
        for line in block.splitlines():
            line = line.strip()
            if not line.startswith("- "):
                continue
            aspect = line[2:].strip()
            mappings.append(
                {"aspect": aspect, "canonical": self.consolidation_map.get(aspect, aspect)}
            )
        return json.dumps({"mappings": mappings})

    def _summarize(self, prompt: str) -> str:
        headers = _ASPECT_HEADER_RE.findall(prompt)
        text = ""
        for aspect, sentiment, count in headers:
            sentence = self.summary_sentences[sentiment].format(aspect=aspect, count=count)
            candidate = f"{text} {sentence}".strip()
            if len(candidate) > 500:
                break
            text = candidate
        filler_idx = 0
        while len(text) < 300:
            candidate = f"{text} {self.summary_fillers[filler_idx % len(self.summary_fillers)]}"
            candidate = candidate.strip()
            if len(candidate) > 500:
                break
            text = candidate
            filler_idx += 1
        return text[:500]


class HttpBackend:
    """Adapter for an OpenAI-style chat-completion endpoint.

    The credential is read from the LLM_API_KEY environment variable; request
    and response shapes stay private to this adapter.
    """

    def __init__(self, endpoint: str, model_id: str) -> None:
        if not endpoint:
            raise GatewayConfigError("http backend requires an endpoint URL")
        self.endpoint = endpoint
        self.model_id = model_id
        self.backend_id = f"http:{model_id}"

    def send(self, call: LlmCall) -> str:
        api_key = os.environ.get(API_KEY_ENV)
        if not api_key:
            raise AuthFailure(f"{API_KEY_ENV} is not set")
        try:
            response = httpx.post(
                self.endpoint,
                json={
                    "model": self.model_id,
                    "messages": [{"role": "user", "content": call.rendered_prompt}],
                },
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=call.timeout,
            )
        except httpx.TimeoutException as exc:
            raise AttemptTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise TransientError(str(exc)) from exc
        if response.status_code in (401, 403):
            raise AuthFailure(f"backend rejected the credential ({response.status_code})")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientError(f"backend returned {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransientError(f"unexpected response shape: {exc}") from exc


class CountingBackend:
    """Wraps another backend and counts dispatches, for tests and diagnostics."""

    def __init__(self, inner) -> None:
        self.inner = inner
        self.backend_id = inner.backend_id
        self.calls = 0
        self.calls_by_template: dict[TemplateId, int] = {}
        self._lock = threading.Lock()

    def send(self, call: LlmCall) -> str:
        with self._lock:
            self.calls += 1
            self.calls_by_template[call.template_id] = (
                self.calls_by_template.get(call.template_id, 0) + 1
            )
        return self.inner.send(call)
