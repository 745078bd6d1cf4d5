"""Validation of structured LLM output, with a single repair pass."""

from __future__ import annotations

import json
import re
from enum import Enum
from typing import Union

from ..domain import Sentiment
from .errors import MalformedOutput


class SchemaId(Enum):
    EXTRACTION = "extraction"
    CONSOLIDATION = "consolidation"
    SUMMARY_TEXT = "summary_text"


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)

ParsedPayload = Union[list[tuple[str, Sentiment]], list[tuple[str, str]], str]


def _repair(raw_text: str) -> str:
    """Strip markdown fences and leading prose before the first JSON bracket."""
    fenced = _FENCE_RE.search(raw_text)
    if fenced:
        raw_text = fenced.group(1)
    start = min(
        (idx for idx in (raw_text.find("{"), raw_text.find("[")) if idx != -1),
        default=-1,
    )
    if start > 0:
        raw_text = raw_text[start:]
    return raw_text.strip()


def _load_json(raw_text: str) -> object:
    try:
        return json.loads(raw_text)
    except json.JSONDecodeError:
        pass
    try:
        return json.loads(_repair(raw_text))
    except json.JSONDecodeError as exc:
        raise MalformedOutput(f"not valid JSON after repair: {exc}") from None


def _parse_extraction(payload: object) -> list[tuple[str, Sentiment]]:
    if not isinstance(payload, dict) or not isinstance(payload.get("aspects"), list):
        raise MalformedOutput("expected an object with an 'aspects' list")
    mentions: list[tuple[str, Sentiment]] = []
    for item in payload["aspects"]:
        if not isinstance(item, dict):
            raise MalformedOutput(f"aspect entry is not an object: {item!r}")
        aspect = item.get("aspect")
        label = item.get("sentiment")
        if not isinstance(aspect, str) or not isinstance(label, str):
            raise MalformedOutput(f"aspect entry has wrong field types: {item!r}")
        try:
            sentiment = Sentiment.from_label(label)
        except ValueError as exc:
            raise MalformedOutput(str(exc)) from None
        mentions.append((aspect, sentiment))
    return mentions


def _parse_consolidation(payload: object) -> list[tuple[str, str]]:
    if not isinstance(payload, dict) or not isinstance(payload.get("mappings"), list):
        raise MalformedOutput("expected an object with a 'mappings' list")
    pairs: list[tuple[str, str]] = []
    for item in payload["mappings"]:
        if not isinstance(item, dict):
            raise MalformedOutput(f"mapping entry is not an object: {item!r}")
        aspect = item.get("aspect")
        canonical = item.get("canonical")
        if not isinstance(aspect, str) or not isinstance(canonical, str):
            raise MalformedOutput(f"mapping entry has wrong field types: {item!r}")
        pairs.append((aspect, canonical))
    return pairs


def parse_structured(raw_text: str, schema_id: SchemaId) -> ParsedPayload:
    """Validate raw backend output against the schema expected for the call.

    Raises MalformedOutput when the payload cannot be coerced; the caller
    decides whether to retry the call or skip the item.
    """
    if not raw_text or not raw_text.strip():
        raise MalformedOutput("empty output")
    if schema_id is SchemaId.SUMMARY_TEXT:
        return raw_text.strip()
    payload = _load_json(raw_text)
    if schema_id is SchemaId.EXTRACTION:
        return _parse_extraction(payload)
    return _parse_consolidation(payload)
