"""JSON-friendly dict conversions for the domain types."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Mapping, Optional

from .domain import AspectMention, ExtractionResult, Review, Sentiment, SummaryRecord


def dt_to_iso(value: datetime) -> str:
    return value.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def dt_from_iso(value: str) -> datetime:
    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def review_to_dict(review: Review) -> dict:
    data: dict = {
        "review_id": review.review_id,
        "product_id": review.product_id,
        "text": review.text,
        "created_at": dt_to_iso(review.created_at),
    }
    if review.verified_purchaser is not None:
        data["verified_purchaser"] = review.verified_purchaser
    if review.language is not None:
        data["language"] = review.language
    return data


def review_from_dict(data: Mapping) -> Review:
    return Review(
        review_id=data["review_id"],
        product_id=data["product_id"],
        text=data["text"],
        created_at=dt_from_iso(data["created_at"]),
        verified_purchaser=data.get("verified_purchaser"),
        language=data.get("language"),
    )


def mention_to_dict(mention: AspectMention) -> dict:
    return {"aspect": mention.aspect, "sentiment": mention.sentiment.value}


def mention_from_dict(data: Mapping) -> AspectMention:
    return AspectMention(aspect=data["aspect"], sentiment=Sentiment.from_label(data["sentiment"]))


def extraction_to_dict(result: ExtractionResult) -> dict:
    return {
        "review_id": result.review_id,
        "mentions": [mention_to_dict(m) for m in result.mentions],
        "model_id": result.model_id,
        "extracted_at": dt_to_iso(result.extracted_at),
    }


def extraction_from_dict(data: Mapping) -> ExtractionResult:
    return ExtractionResult(
        review_id=data["review_id"],
        mentions=tuple(mention_from_dict(m) for m in data["mentions"]),
        model_id=data["model_id"],
        extracted_at=dt_from_iso(data["extracted_at"]),
    )


def summary_to_dict(record: SummaryRecord) -> dict:
    return {
        "product_id": record.product_id,
        "summary_text": record.summary_text,
        "aspects_used": list(record.aspects_used),
        "review_count_at_generation": record.review_count_at_generation,
        "generated_at": dt_to_iso(record.generated_at),
        "model_id": record.model_id,
        "length_ok": record.length_ok,
        "target_length": list(record.target_length),
    }


def summary_from_dict(data: Mapping) -> SummaryRecord:
    target: Optional[list] = data.get("target_length")
    return SummaryRecord(
        product_id=data["product_id"],
        summary_text=data["summary_text"],
        aspects_used=tuple(data["aspects_used"]),
        review_count_at_generation=data["review_count_at_generation"],
        generated_at=dt_from_iso(data["generated_at"]),
        model_id=data["model_id"],
        length_ok=data["length_ok"],
        target_length=tuple(target) if target else (300, 500),
    )
