"""Uniform LLM access: templates, retrying dispatch, and output validation."""

from __future__ import annotations

from ..config import PipelineConfig
from .backends import CountingBackend, HttpBackend, MockBackend
from .core import Backend, LlmCall, LlmGateway, LlmOutcome
from .errors import (
    AuthFailure,
    ExhaustedRetries,
    GatewayConfigError,
    GatewayError,
    GatewayTimeout,
    MalformedOutput,
)
from .parsing import SchemaId, parse_structured
from .templates import PromptTemplate, TemplateId, load_templates, render_prompt

__all__ = [
    "AuthFailure",
    "Backend",
    "CountingBackend",
    "ExhaustedRetries",
    "GatewayConfigError",
    "GatewayError",
    "GatewayTimeout",
    "HttpBackend",
    "LlmCall",
    "LlmGateway",
    "LlmOutcome",
    "MalformedOutput",
    "MockBackend",
    "PromptTemplate",
    "SchemaId",
    "TemplateId",
    "gateway_from_config",
    "load_templates",
    "parse_structured",
    "render_prompt",
]


def gateway_from_config(config: PipelineConfig) -> LlmGateway:
    """Build a gateway whose backend and limits come from the config file."""
    if config.backend == "mock":
        backend: Backend = MockBackend()
    elif config.backend == "http":
        backend = HttpBackend(endpoint=config.endpoint, model_id=config.model_id)
    else:
        raise GatewayConfigError(f"unknown backend {config.backend!r}")
    return LlmGateway(
        backend,
        templates=load_templates(config.templates_dir),
        max_attempts=config.max_attempts,
        timeout=config.timeout_seconds,
        backoff_base=config.backoff_base_seconds,
        parallelism=config.parallelism,
    )
