"""Embedded keyed store with an append-only JSONL journal."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import IO, Optional, Protocol

from .domain import ExtractionResult, Review, SummaryRecord
from .serde import (
    extraction_from_dict,
    extraction_to_dict,
    review_from_dict,
    review_to_dict,
    summary_from_dict,
    summary_to_dict,
)


class StoreError(Exception):
    """Raised when a journal record cannot be written or replayed."""


class DuplicateReviewError(StoreError):
    def __init__(self, review_id: str) -> None:
        super().__init__(f"review {review_id!r} already exists")
        self.review_id = review_id


class ReviewStore(Protocol):
    """Contract the orchestrator needs; a networked database can substitute."""

    def put_review(self, review: Review) -> None: ...

    def get_review(self, review_id: str) -> Optional[Review]: ...

    def get_reviews(self, product_id: str) -> list[Review]: ...

    def put_extraction(self, result: ExtractionResult) -> None: ...

    def get_extraction(self, review_id: str) -> Optional[ExtractionResult]: ...

    def put_summary(self, record: SummaryRecord) -> None: ...

    def get_summary(self, product_id: str) -> Optional[SummaryRecord]: ...

    def product_ids(self) -> list[str]: ...


class JournalStore:
    """In-memory keyed store backed by an append-only journal file.

    Every write is appended and flushed before it becomes visible, so a
    reloaded store reproduces the same state and therefore the same trigger
    decisions. With ``path=None`` the store is purely in memory.
    """

    def __init__(self, path: Optional[str | Path] = None) -> None:
        self._reviews: dict[str, Review] = {}
        self._by_product: dict[str, list[str]] = {}
        self._extractions: dict[str, ExtractionResult] = {}
        self._summaries: dict[str, SummaryRecord] = {}
        self._lock = threading.RLock()
        self._journal: Optional[IO[str]] = None
        self._path = Path(path) if path is not None else None
        if self._path is not None:
            if self._path.exists():
                self._replay(self._path)
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._journal = self._path.open("a", encoding="utf-8")

    def _replay(self, path: Path) -> None:
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                kind = record["kind"]
                data = record["data"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise StoreError(f"{path}:{lineno}: bad journal record: {exc}") from exc
            if kind == "review":
                self._index_review(review_from_dict(data))
            elif kind == "extraction":
                result = extraction_from_dict(data)
                self._extractions[result.review_id] = result
            elif kind == "summary":
                summary = summary_from_dict(data)
                self._summaries[summary.product_id] = summary
            else:
                raise StoreError(f"{path}:{lineno}: unknown journal kind {kind!r}")

    def _index_review(self, review: Review) -> None:
        self._reviews[review.review_id] = review
        self._by_product.setdefault(review.product_id, []).append(review.review_id)

    def _append(self, kind: str, data: dict) -> None:
        if self._journal is None:
            return
        try:
            self._journal.write(json.dumps({"kind": kind, "data": data}) + "\n")
            self._journal.flush()
        except OSError as exc:
            raise StoreError(f"journal write failed: {exc}") from exc

    def put_review(self, review: Review) -> None:
        with self._lock:
            if review.review_id in self._reviews:
                raise DuplicateReviewError(review.review_id)
            self._append("review", review_to_dict(review))
            self._index_review(review)

    def get_review(self, review_id: str) -> Optional[Review]:
        with self._lock:
            return self._reviews.get(review_id)

    def get_reviews(self, product_id: str) -> list[Review]:
        with self._lock:
            return [self._reviews[rid] for rid in self._by_product.get(product_id, [])]

    def put_extraction(self, result: ExtractionResult) -> None:
        with self._lock:
            self._append("extraction", extraction_to_dict(result))
            self._extractions[result.review_id] = result

    def get_extraction(self, review_id: str) -> Optional[ExtractionResult]:
        with self._lock:
            return self._extractions.get(review_id)

    def put_summary(self, record: SummaryRecord) -> None:
        with self._lock:
            self._append("summary", summary_to_dict(record))
            self._summaries[record.product_id] = record

    def get_summary(self, product_id: str) -> Optional[SummaryRecord]:
        with self._lock:
            return self._summaries.get(product_id)

    def product_ids(self) -> list[str]:
        with self._lock:
            return list(self._by_product)

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()
            self._journal = None
