"""Gateway contract: call descriptors, outcomes, and the retrying dispatcher."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Protocol

from .errors import AuthFailure, ExhaustedRetries, GatewayConfigError, GatewayTimeout
from .parsing import ParsedPayload, SchemaId, parse_structured
from .templates import PromptTemplate, TemplateId, load_templates


@dataclass(frozen=True)
class LlmCall:
    """One logical request to the model backend."""

    template_id: TemplateId
    rendered_prompt: str
    attempt: int = 1
    max_attempts: int = 3
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.attempt < 1 or self.attempt > self.max_attempts:
            raise ValueError("attempt must satisfy 1 <= attempt <= max_attempts")


@dataclass(frozen=True)
class LlmOutcome:
    """Raw backend response, optionally with a validated payload attached."""

    raw_text: str
    backend_id: str
    latency: float
    parsed: Optional[ParsedPayload] = None


class TransientError(Exception):
    """Retryable transport or rate-limit failure raised by a backend."""


class AttemptTimeout(TransientError):
    """A single attempt exceeded the call timeout."""


class Backend(Protocol):
    backend_id: str

    def send(self, call: LlmCall) -> str: ...


class LlmGateway:
    """Dispatches prompts to a backend with bounded retries and parallelism.

    Safe to share across threads; per-call state is local. Raises
    AuthFailure, GatewayTimeout, or ExhaustedRetries depending on how the
    attempts failed.
    """

    def __init__(
        self,
        backend: Backend,
        templates: Optional[Mapping[TemplateId, PromptTemplate]] = None,
        max_attempts: int = 3,
        timeout: float = 60.0,
        backoff_base: float = 1.0,
        parallelism: int = 8,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if max_attempts < 1:
            raise GatewayConfigError("max_attempts must be >= 1")
        if parallelism < 1:
            raise GatewayConfigError("parallelism must be >= 1")
        self.backend = backend
        self.templates = dict(templates) if templates is not None else load_templates()
        self.max_attempts = max_attempts
        self.timeout = timeout
        self.backoff_base = backoff_base
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(parallelism)

    def render(self, template_id: TemplateId, bindings: Mapping[str, str]) -> str:
        return self.templates[template_id].render(bindings)

    def new_call(self, template_id: TemplateId, rendered_prompt: str) -> LlmCall:
        return LlmCall(
            template_id=template_id,
            rendered_prompt=rendered_prompt,
            max_attempts=self.max_attempts,
            timeout=self.timeout,
        )

    def complete(self, call: LlmCall) -> LlmOutcome:
        """Send a call, retrying with exponential backoff on transient failures."""
        if not call.rendered_prompt.strip():
            raise GatewayConfigError("refusing to dispatch an empty prompt")
        last_error: Optional[Exception] = None
        all_timeouts = True
        for attempt in range(1, call.max_attempts + 1):
            attempt_call = replace(call, attempt=attempt)
            started = time.monotonic()
            try:
                with self._slots:
                    raw_text = self.backend.send(attempt_call)
                return LlmOutcome(
                    raw_text=raw_text,
                    backend_id=self.backend.backend_id,
                    latency=time.monotonic() - started,
                )
            except AuthFailure:
                raise
            except TransientError as exc:
                last_error = exc
                all_timeouts = all_timeouts and isinstance(exc, AttemptTimeout)
                if attempt < call.max_attempts:
                    self._sleep(self.backoff_base * (2 ** (attempt - 1)))
        assert last_error is not None
        if all_timeouts:
            raise GatewayTimeout(f"all {call.max_attempts} attempts timed out") from last_error
        raise ExhaustedRetries(call.max_attempts, last_error)

    def run(
        self,
        template_id: TemplateId,
        bindings: Mapping[str, str],
        schema_id: SchemaId,
    ) -> LlmOutcome:
        """Render, complete, and parse in one step.

        Parse failures propagate as MalformedOutput; the outcome carries the
        validated payload on success.
        """
        prompt = self.render(template_id, bindings)
        outcome = self.complete(self.new_call(template_id, prompt))
        parsed = parse_structured(outcome.raw_text, schema_id)
        return replace(outcome, parsed=parsed)
