"""Shared domain types for the review summarization pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Optional


class Sentiment(Enum):
    """Polarity of an opinion about one product aspect."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"

    @classmethod
    def from_label(cls, label: str) -> "Sentiment":
        """Parse a sentiment label case-insensitively; raises ValueError otherwise."""
        try:
            return cls(label.strip().lower())
        except (ValueError, AttributeError):
            raise ValueError(f"unknown sentiment label: {label!r}") from None


class ErrorLabel(Enum):
    """Human-evaluation error categories for generated summaries."""

    NO_ERRORS = "NO_ERRORS"
    EXAGGERATION_UNDERSTATEMENT = "EXAGGERATION_UNDERSTATEMENT"
    MINOR_MISREPRESENTATION = "MINOR_MISREPRESENTATION"
    MAJOR_MISREPRESENTATION = "MAJOR_MISREPRESENTATION"
    MINOR_OMISSION = "MINOR_OMISSION"
    MAJOR_OMISSION = "MAJOR_OMISSION"


MINOR_LABELS = frozenset({ErrorLabel.MINOR_MISREPRESENTATION, ErrorLabel.MINOR_OMISSION})
MAJOR_LABELS = frozenset(
    {
        ErrorLabel.EXAGGERATION_UNDERSTATEMENT,
        ErrorLabel.MAJOR_MISREPRESENTATION,
        ErrorLabel.MAJOR_OMISSION,
    }
)

MAX_MENTIONS_PER_REVIEW = 5


def normalize_aspect(raw: str) -> str:
    """Casefold, trim, and collapse internal whitespace. Idempotent."""
    return " ".join(raw.casefold().split())


def _ensure_utc(value: datetime, name: str) -> datetime:
    if value.tzinfo is None or value.utcoffset() is None:
        raise ValueError(f"{name} must be timezone-aware")
    return value.astimezone(timezone.utc)


@dataclass(frozen=True)
class Review:
    """One customer review as ingested from a store or dataset row."""

    review_id: str
    product_id: str
    text: str
    created_at: datetime
    verified_purchaser: Optional[bool] = None
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.review_id:
            raise ValueError("review_id must be non-empty")
        if not self.product_id:
            raise ValueError("product_id must be non-empty")
        if not self.text.strip():
            raise ValueError("review text must be non-empty")
        object.__setattr__(self, "created_at", _ensure_utc(self.created_at, "created_at"))


@dataclass(frozen=True)
class AspectMention:
    """A normalized aspect string paired with its sentiment."""

    aspect: str
    sentiment: Sentiment

    def __post_init__(self) -> None:
        if not self.aspect:
            raise ValueError("aspect must be non-empty")
        if self.aspect != normalize_aspect(self.aspect):
            raise ValueError(f"aspect is not normalized: {self.aspect!r}")


@dataclass(frozen=True)
class ExtractionResult:
    """Aspect-sentiment pairs extracted from a single review."""

    review_id: str
    mentions: tuple[AspectMention, ...]
    model_id: str
    extracted_at: datetime

    def __post_init__(self) -> None:
        if len(self.mentions) > MAX_MENTIONS_PER_REVIEW:
            raise ValueError(
                f"at most {MAX_MENTIONS_PER_REVIEW} mentions allowed, got {len(self.mentions)}"
            )
        aspects = [m.aspect for m in self.mentions]
        if len(set(aspects)) != len(aspects):
            raise ValueError("mentions must not repeat an aspect")
        object.__setattr__(self, "extracted_at", _ensure_utc(self.extracted_at, "extracted_at"))


class ConsolidationMap:
    """Mutable mapping from raw aspects to canonical aspects.

    Every canonical aspect is a fixed point (``entries[c] == c``), so repeated
    application of the map never changes an already-canonical aspect. Chains
    returned by the consolidation backend are collapsed at write time.
    """

    def __init__(
        self,
        entries: Optional[dict[str, str]] = None,
        frequency: Optional[dict[str, int]] = None,
        threshold: Optional[int] = None,
        version: int = 0,
    ) -> None:
        self.entries: dict[str, str] = dict(entries or {})
        self.frequency: dict[str, int] = dict(frequency or {})
        self.threshold = threshold
        self.version = version
        # Aspects parked on an identity mapping after a backend failure;
        # candidates for a later re-consolidation pass.
        self.needs_reconsolidation: set[str] = set()

    def canonical_for(self, aspect: str) -> Optional[str]:
        """Cached canonical form, or None if the aspect has never been seen."""
        return self.entries.get(aspect)

    def register(self, raw: str, canonical: str) -> str:
        """Record ``raw -> canonical``, collapsing chains; returns the terminal form."""
        terminal = self.follow(canonical)
        self.entries[terminal] = terminal
        self.entries[raw] = terminal
        return terminal

    def follow(self, aspect: str) -> str:
        """Resolve through existing entries to a fixed point (cycle-safe)."""
        seen = [aspect]
        current = aspect
        while True:
            nxt = self.entries.get(current)
            if nxt is None or nxt == current:
                return current
            if nxt in seen:
                # Defensive: a cycle can only come from a misbehaving backend.
                return min(seen[seen.index(nxt) :])
            seen.append(nxt)
            current = nxt

    def check_invariants(self) -> None:
        """Raise AssertionError if the fixed-point property is violated."""
        for raw, canonical in self.entries.items():
            assert self.entries.get(canonical) == canonical, (
                f"canonical {canonical!r} (from {raw!r}) is not a fixed point"
            )


@dataclass(frozen=True)
class ProductAspectProfile:
    """Per-product review counts for each (canonical aspect, sentiment) pair."""

    product_id: str
    pair_reviews: Mapping[tuple[str, Sentiment], tuple[str, ...]]
    review_count: int

    @property
    def pair_counts(self) -> dict[tuple[str, Sentiment], int]:
        return {pair: len(ids) for pair, ids in self.pair_reviews.items()}

    def aspect_totals(self) -> dict[str, int]:
        """Total review count per aspect, summed across sentiments."""
        totals: dict[str, int] = {}
        for (aspect, _), ids in self.pair_reviews.items():
            totals[aspect] = totals.get(aspect, 0) + len(ids)
        return totals


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of aspect-based review selection for one product."""

    product_id: str
    selected_aspects: tuple[tuple[str, Mapping[Sentiment, int]], ...]
    buckets: Mapping[tuple[str, Sentiment], tuple[str, ...]]
    picked: Mapping[tuple[str, Sentiment], tuple[str, ...]]
    selected_review_ids: tuple[str, ...]
    seed: int

    def __post_init__(self) -> None:
        ids = self.selected_review_ids
        if len(set(ids)) != len(ids):
            raise ValueError("selected_review_ids must not contain duplicates")


@dataclass(frozen=True)
class SummaryRecord:
    """A generated product summary plus the metadata needed for refresh decisions."""

    product_id: str
    summary_text: str
    aspects_used: tuple[str, ...]
    review_count_at_generation: int
    generated_at: datetime
    model_id: str
    length_ok: bool
    target_length: tuple[int, int] = (300, 500)

    def __post_init__(self) -> None:
        object.__setattr__(self, "generated_at", _ensure_utc(self.generated_at, "generated_at"))


@dataclass(frozen=True)
class RefreshState:
    """Review-count bookkeeping that drives summary (re)generation triggers."""

    product_id: str
    current_review_count: int = 0
    count_at_last_summary: Optional[int] = None

    def __post_init__(self) -> None:
        if self.current_review_count < 0:
            raise ValueError("current_review_count must be >= 0")
        if (
            self.count_at_last_summary is not None
            and self.count_at_last_summary > self.current_review_count
        ):
            raise ValueError("count_at_last_summary cannot exceed current_review_count")

    @property
    def has_summary(self) -> bool:
        return self.count_at_last_summary is not None


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's judgment of one product summary."""

    product_id: str
    annotator_id: str
    labels: frozenset[ErrorLabel]
    reason: str = ""

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("labels must be non-empty")
        if ErrorLabel.NO_ERRORS in self.labels and len(self.labels) > 1:
            raise ValueError("NO_ERRORS excludes every other label")
        object.__setattr__(self, "labels", frozenset(self.labels))
