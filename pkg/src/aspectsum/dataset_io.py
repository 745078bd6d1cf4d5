"""Read/write the released dataset tables and compute corpus statistics."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .domain import AspectMention, Review, Sentiment, normalize_aspect
from .serde import dt_from_iso, dt_to_iso

MAX_ROW_MENTIONS = 5
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

REVIEW_COLUMNS = ("review_id", "product_id", "review_text", "aspects")
SUMMARY_COLUMNS = ("product_id", "product_class", "summary")

ReviewRecord = tuple[Review, tuple[AspectMention, ...]]


class DatasetError(Exception):
    """Fatal problem with a dataset file (unreadable or wrong schema)."""


@dataclass(frozen=True)
class RejectedRow:
    row_number: int
    reason: str


@dataclass
class LoadReport:
    rejects: list[RejectedRow] = field(default_factory=list)

    def reject(self, row_number: int, reason: str) -> None:
        self.rejects.append(RejectedRow(row_number, reason))


@dataclass(frozen=True)
class SummaryRow:
    product_id: str
    product_class: str
    summary: str


@dataclass(frozen=True)
class CorpusStats:
    """Aggregate statistics over a reviews table, order-independent."""

    total_reviews: int
    total_products: int
    distinct_aspects: int
    mean_review_length: float
    mean_reviews_per_product: float
    aspect_counts: Mapping[str, int]
    sentiment_percentages: Mapping[str, Mapping[Sentiment, float]]

    def top(self, k: int = 10) -> list[tuple[str, int]]:
        ranked = sorted(self.aspect_counts.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:k]


def _parse_mentions(raw: str) -> tuple[AspectMention, ...]:
    try:
        payload = json.loads(raw) if raw.strip() else []
    except json.JSONDecodeError as exc:
        raise ValueError(f"aspects field is not valid JSON: {exc}") from None
    if not isinstance(payload, list):
        raise ValueError("aspects field must be a JSON array")
    mentions: list[AspectMention] = []
    seen: set[str] = set()
    for item in payload:
        if not isinstance(item, dict):
            raise ValueError(f"aspect entry is not an object: {item!r}")
        aspect = normalize_aspect(str(item.get("aspect", "")))
        if not aspect:
            raise ValueError("aspect entry has an empty aspect")
        sentiment = Sentiment.from_label(str(item.get("sentiment", "")))
        if aspect in seen:
            continue
        seen.add(aspect)
        mentions.append(AspectMention(aspect=aspect, sentiment=sentiment))
    if len(mentions) > MAX_ROW_MENTIONS:
        raise ValueError(f"{len(mentions)} aspects on one row, at most {MAX_ROW_MENTIONS} allowed")
    return tuple(mentions)


def _iter_rows(path: Path, required: Sequence[str]) -> Iterable[tuple[int, dict]]:
    """Yield (row_number, row_dict) from a CSV or newline-delimited JSON file."""
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        with path.open(encoding="utf-8") as fh:
            for number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    yield number, {"__error__": f"invalid JSON: {exc}"}
                    continue
                yield number, row
        return
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise DatasetError(f"{path}: missing required columns {missing}")
        for number, row in enumerate(reader, start=2):  # header is line 1
            yield number, row


def load_reviews_table(
    path: str | Path,
    column_map: Optional[Mapping[str, str]] = None,
) -> tuple[list[ReviewRecord], LoadReport]:
    """Load a reviews table; malformed rows go to the report, not the caller.

    ``column_map`` renames logical columns (review_id, product_id,
    review_text, aspects, created_at, verified_purchaser, language) to the
    file's actual headers, absorbing schema differences.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: file not found")
    columns = {name: name for name in REVIEW_COLUMNS}
    columns.update({"created_at": "created_at", "verified_purchaser": "verified_purchaser",
                    "language": "language"})
    if column_map:
        columns.update(column_map)

    report = LoadReport()
    records: list[ReviewRecord] = []
    seen_ids: set[str] = set()
    required = [columns[name] for name in REVIEW_COLUMNS]
    for number, row in _iter_rows(path, required):
        if "__error__" in row:
            report.reject(number, row["__error__"])
            continue
        try:
            review_id = str(row.get(columns["review_id"]) or "").strip()
            product_id = str(row.get(columns["product_id"]) or "").strip()
            text = str(row.get(columns["review_text"]) or "")
            if not review_id:
                raise ValueError("missing review_id")
            if review_id in seen_ids:
                raise ValueError(f"duplicate review_id {review_id!r}")
            if not product_id:
                raise ValueError("missing product_id")
            if not text.strip():
                raise ValueError("empty review_text")
            mentions = _parse_mentions(str(row.get(columns["aspects"]) or ""))
            created_raw = row.get(columns["created_at"])
            created_at = dt_from_iso(str(created_raw)) if created_raw else _EPOCH
            verified_raw = row.get(columns["verified_purchaser"])
            verified = None
            if verified_raw not in (None, ""):
                verified = str(verified_raw).strip().lower() in ("true", "1", "yes")
            language = row.get(columns["language"]) or None
            review = Review(
                review_id=review_id,
                product_id=product_id,
                text=text,
                created_at=created_at,
                verified_purchaser=verified,
                language=language,
            )
        except ValueError as exc:
            report.reject(number, str(exc))
            continue
        seen_ids.add(review_id)
        records.append((review, mentions))
    return records, report


def write_reviews_table(path: str | Path, records: Iterable[ReviewRecord]) -> None:
    """Write records as CSV in the documented column order."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL)
        writer.writerow(REVIEW_COLUMNS + ("created_at",))
        for review, mentions in records:
            writer.writerow(
                [
                    review.review_id,
                    review.product_id,
                    review.text,
                    json.dumps(
                        [{"aspect": m.aspect, "sentiment": m.sentiment.value} for m in mentions]
                    ),
                    dt_to_iso(review.created_at),
                ]
            )


def load_summaries_table(path: str | Path) -> tuple[list[SummaryRow], LoadReport]:
    """Load the product summaries table; duplicate product rows are rejected."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: file not found")
    report = LoadReport()
    rows: list[SummaryRow] = []
    seen: set[str] = set()
    for number, row in _iter_rows(path, SUMMARY_COLUMNS):
        if "__error__" in row:
            report.reject(number, row["__error__"])
            continue
        product_id = str(row.get("product_id") or "").strip()
        product_class = str(row.get("product_class") or "").strip()
        summary = str(row.get("summary") or "")
        if not product_id:
            report.reject(number, "missing product_id")
            continue
        if product_id in seen:
            report.reject(number, f"duplicate product_id {product_id!r}")
            continue
        if not product_class:
            report.reject(number, "missing product_class")
            continue
        seen.add(product_id)
        rows.append(SummaryRow(product_id, product_class, summary))
    return rows, report


def compute_corpus_stats(records: Sequence[ReviewRecord]) -> CorpusStats:
    """Aggregate mention counts, sentiment splits, and corpus averages.

    All accumulation is integral, so any permutation of the input rows gives
    an identical result.
    """
    aspect_counts: dict[str, int] = {}
    sentiment_counts: dict[str, dict[Sentiment, int]] = {}
    products: set[str] = set()
    total_chars = 0
    for review, mentions in records:
        products.add(review.product_id)
        total_chars += len(review.text)
        for mention in mentions:
            aspect_counts[mention.aspect] = aspect_counts.get(mention.aspect, 0) + 1
            by_sentiment = sentiment_counts.setdefault(
                mention.aspect, {s: 0 for s in Sentiment}
            )
            by_sentiment[mention.sentiment] += 1

    percentages = {
        aspect: {
            sentiment: round(100.0 * count / aspect_counts[aspect], 2)
            for sentiment, count in by_sentiment.items()
        }
        for aspect, by_sentiment in sentiment_counts.items()
    }
    total = len(records)
    return CorpusStats(
        total_reviews=total,
        total_products=len(products),
        distinct_aspects=len(aspect_counts),
        mean_review_length=(total_chars / total) if total else 0.0,
        mean_reviews_per_product=(total / len(products)) if products else 0.0,
        aspect_counts=aspect_counts,
        sentiment_percentages=percentages,
    )


def format_stats_report(stats: CorpusStats, k: int = 10) -> str:
    """Tab-separated top-aspect table plus corpus averages."""
    lines = ["Aspect\tCount\tPos.\tNeg.\tMix."]
    for aspect, count in stats.top(k):
        pct = stats.sentiment_percentages[aspect]
        lines.append(
            f"{aspect}\t{count}\t{pct[Sentiment.POSITIVE]:.2f}"
            f"\t{pct[Sentiment.NEGATIVE]:.2f}\t{pct[Sentiment.MIXED]:.2f}"
        )
    lines.append("")
    lines.append(f"reviews\t{stats.total_reviews}")
    lines.append(f"products\t{stats.total_products}")
    lines.append(f"distinct_aspects\t{stats.distinct_aspects}")
    lines.append(f"mean_review_length\t{stats.mean_review_length:.2f}")
    lines.append(f"mean_reviews_per_product\t{stats.mean_reviews_per_product:.2f}")
    return "\n".join(lines)
