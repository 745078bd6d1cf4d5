"""Stage 1: extract aspect-sentiment pairs from individual reviews."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Optional, Sequence

from .domain import AspectMention, ExtractionResult, Review, Sentiment, normalize_aspect
from .gateway import LlmGateway, MalformedOutput, SchemaId, TemplateId
from .gateway.errors import GatewayError

log = logging.getLogger(__name__)

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class ExtractionFailed(Exception):
    """The gateway could not produce a usable extraction for one review."""

    def __init__(self, review_id: str, reason: str) -> None:
        super().__init__(f"extraction failed for review {review_id}: {reason}")
        self.review_id = review_id
        self.reason = reason


@dataclass(frozen=True)
class BatchReport:
    """Per-review failures collected while a batch ran to completion."""

    failures: tuple[ExtractionFailed, ...]

    @property
    def failed_review_ids(self) -> tuple[str, ...]:
        return tuple(f.review_id for f in self.failures)


def _to_mentions(pairs: Sequence[tuple[str, Sentiment]]) -> tuple[AspectMention, ...]:
    """Normalize, drop empties, dedupe keeping the first sentiment, cap at five."""
    mentions: list[AspectMention] = []
    seen: set[str] = set()
    for raw_aspect, sentiment in pairs:
        aspect = normalize_aspect(raw_aspect)
        if not aspect or aspect in seen:
            continue
        seen.add(aspect)
        mentions.append(AspectMention(aspect=aspect, sentiment=sentiment))
        if len(mentions) == 5:
            break
    return tuple(mentions)


def extract_aspects(
    review: Review,
    gateway: LlmGateway,
    clock: Clock = _utc_now,
) -> ExtractionResult:
    """Extract up to five mentions for one review via the gateway.

    Retries the full call once on malformed output before giving up; gateway
    exhaustion and repeated malformed output raise ExtractionFailed.
    """
    if not review.text.strip():
        raise ExtractionFailed(review.review_id, "empty review text")
    bindings = {"review_text": review.text}
    last_reason = ""
    for _ in range(2):
        try:
            outcome = gateway.run(TemplateId.ASPECT_EXTRACTION, bindings, SchemaId.EXTRACTION)
        except MalformedOutput as exc:
            last_reason = f"malformed output: {exc}"
            continue
        except GatewayError as exc:
            raise ExtractionFailed(review.review_id, str(exc)) from exc
        assert outcome.parsed is not None
        return ExtractionResult(
            review_id=review.review_id,
            mentions=_to_mentions(outcome.parsed),
            model_id=outcome.backend_id,
            extracted_at=clock(),
        )
    raise ExtractionFailed(review.review_id, last_reason)


def extract_batch(
    reviews: Sequence[Review],
    gateway: LlmGateway,
    parallelism: int = 8,
    clock: Clock = _utc_now,
) -> tuple[list[Optional[ExtractionResult]], BatchReport]:
    """Extract every review concurrently, preserving input order.

    The batch always completes: a failed review yields None in its slot and
    an entry in the report.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    results: list[Optional[ExtractionResult]] = [None] * len(reviews)
    failures: list[ExtractionFailed] = []

    def _one(index: int) -> None:
        try:
            results[index] = extract_aspects(reviews[index], gateway, clock=clock)
        except ExtractionFailed as exc:
            log.warning("%s", exc)
            failures.append(exc)

    if reviews:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            list(pool.map(_one, range(len(reviews))))
    failures.sort(key=lambda f: f.review_id)
    return results, BatchReport(failures=tuple(failures))
