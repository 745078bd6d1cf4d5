"""Stage 4: build the structured summarization prompt and validate the output."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Callable, Mapping, Optional, Sequence

from .domain import Review, SelectionResult, SummaryRecord
from .gateway import MalformedOutput, SchemaId, TemplateId, parse_structured
from .gateway.core import LlmGateway
from .gateway.templates import PromptTemplate, render_prompt
from .selection import SENTIMENT_ORDER

SOFT_LENGTH = (300, 500)
HARD_LENGTH = (250, 600)
MAX_REGENERATIONS = 2

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def build_summary_prompt(
    selection: SelectionResult,
    reviews: Sequence[Review],
    templates: Optional[Mapping[TemplateId, PromptTemplate]] = None,
) -> str:
    """Render the summarization prompt for a selection.

    Pairs appear in aspect rank order with their bucket counts; each selected
    review appears once, under the pair that drew it, sorted by review id.
    The rendering is a pure function of its inputs.
    """
    if not selection.selected_aspects or not selection.selected_review_ids:
        raise ValueError("cannot build a summary prompt from an empty selection")
    texts = {review.review_id: review.text for review in reviews}
    sections: list[str] = []
    for aspect, sentiment_counts in selection.selected_aspects:
        for sentiment in SENTIMENT_ORDER:
            count = sentiment_counts.get(sentiment)
            if not count:
                continue
            noun = "review" if count == 1 else "reviews"
            lines = [f"Aspect: {aspect} ({sentiment.value}), mentioned in {count} {noun}"]
            for review_id in sorted(selection.picked.get((aspect, sentiment), ())):
                lines.append(f"- [{review_id}] {texts[review_id]}")
            sections.append("\n".join(lines))
    return render_prompt(
        TemplateId.SUMMARIZATION,
        {"aspect_sections": "\n\n".join(sections)},
        templates,
    )


def length_within(text: str, bounds: tuple[int, int] = HARD_LENGTH) -> bool:
    """Character count check, counting Unicode scalars."""
    return bounds[0] <= len(text) <= bounds[1]


def generate_summary(
    selection: SelectionResult,
    reviews: Sequence[Review],
    gateway: LlmGateway,
    review_count: Optional[int] = None,
    clock: Clock = _utc_now,
) -> SummaryRecord:
    """Generate a length-validated summary for a selection.

    Output outside the hard length window triggers up to two regenerations;
    a final out-of-range text is stored with ``length_ok=False`` rather than
    discarded. Gateway errors propagate to the caller.
    """
    prompt = build_summary_prompt(selection, reviews, gateway.templates)
    call = gateway.new_call(TemplateId.SUMMARIZATION, prompt)
    text = ""
    backend_id = gateway.backend.backend_id
    for _ in range(1 + MAX_REGENERATIONS):
        outcome = gateway.complete(call)
        backend_id = outcome.backend_id
        try:
            text = str(parse_structured(outcome.raw_text, SchemaId.SUMMARY_TEXT))
        except MalformedOutput:
            text = ""
            continue
        if length_within(text):
            break
    return SummaryRecord(
        product_id=selection.product_id,
        summary_text=text,
        aspects_used=tuple(aspect for aspect, _ in selection.selected_aspects),
        review_count_at_generation=(
            review_count if review_count is not None else len(reviews)
        ),
        generated_at=clock(),
        model_id=backend_id,
        length_ok=length_within(text),
        target_length=SOFT_LENGTH,
    )
