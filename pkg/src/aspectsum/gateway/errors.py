"""Error types surfaced by the LLM gateway."""

from __future__ import annotations


class GatewayError(Exception):
    """Base class for all gateway failures."""


class GatewayConfigError(GatewayError):
    """The gateway or a prompt template is misconfigured (e.g. unbound placeholder)."""


class AuthFailure(GatewayError):
    """The backend rejected the configured credential."""


class GatewayTimeout(GatewayError):
    """Every attempt timed out before the backend produced a response."""


class ExhaustedRetries(GatewayError):
    """All attempts failed with transport or rate-limit errors."""

    def __init__(self, attempts: int, last_error: Exception) -> None:
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


class MalformedOutput(GatewayError):
    """Backend output did not match the expected structure, even after repair."""
