"""Drives the four-stage pipeline per product and owns the trigger rules."""

from __future__ import annotations

import hashlib
import logging
import math
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

from .config import PipelineConfig
from .consolidation import Consolidator, apply_mapping
from .domain import ExtractionResult, RefreshState, Review, SummaryRecord
from .extraction import extract_batch
from .gateway import LlmGateway
from .selection import build_profile, make_weighting, select_reviews
from .store import ReviewStore
from .summarization import generate_summary

log = logging.getLogger(__name__)

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class TriggerAction(Enum):
    NONE = "NONE"
    INITIAL_SUMMARY = "INITIAL_SUMMARY"
    REFRESH = "REFRESH"


@dataclass(frozen=True)
class TriggerDecision:
    action: TriggerAction
    reason: str

    @property
    def triggered(self) -> bool:
        return self.action is not TriggerAction.NONE


class PipelineError(Exception):
    """A pipeline stage failed; observable summary state is unchanged."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def refresh_growth_needed(baseline: int, refresh_fraction: float = 0.10) -> int:
    """New reviews needed before a refresh: ceil(fraction * baseline), exactly."""
    return math.ceil(Fraction(str(refresh_fraction)) * baseline)


def evaluate_trigger(
    state: RefreshState,
    min_reviews: int = 10,
    refresh_fraction: float = 0.10,
) -> TriggerDecision:
    """Decide whether the current state warrants a pipeline run."""
    count = state.current_review_count
    if not state.has_summary:
        if count >= min_reviews:
            return TriggerDecision(
                TriggerAction.INITIAL_SUMMARY,
                f"review count {count} reached the minimum of {min_reviews}",
            )
        return TriggerDecision(
            TriggerAction.NONE, f"only {count} of {min_reviews} reviews so far"
        )
    baseline = state.count_at_last_summary
    assert baseline is not None
    needed = refresh_growth_needed(baseline, refresh_fraction)
    growth = count - baseline
    if growth >= needed:
        return TriggerDecision(
            TriggerAction.REFRESH,
            f"{growth} new reviews since the last summary at {baseline} (needed {needed})",
        )
    return TriggerDecision(
        TriggerAction.NONE,
        f"{growth} new reviews since the last summary at {baseline} (needs {needed})",
    )


def on_review_ingested(
    review: Review,
    state: RefreshState,
    min_reviews: int = 10,
    refresh_fraction: float = 0.10,
) -> tuple[RefreshState, TriggerDecision]:
    """Account for one new review and evaluate the trigger rules."""
    if review.product_id != state.product_id:
        raise ValueError(
            f"review {review.review_id} belongs to {review.product_id}, "
            f"state tracks {state.product_id}"
        )
    updated = replace(state, current_review_count=state.current_review_count + 1)
    return updated, evaluate_trigger(updated, min_reviews, refresh_fraction)


def derive_seed(base_seed: int, product_id: str) -> int:
    """Stable per-product sampling seed, identical on every platform."""
    digest = hashlib.sha256(f"{base_seed}:{product_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SummaryOrchestrator:
    """Owns persistence and serializes pipeline runs per product."""

    def __init__(
        self,
        store: ReviewStore,
        gateway: LlmGateway,
        consolidator: Consolidator,
        config: Optional[PipelineConfig] = None,
        clock: Clock = _utc_now,
    ) -> None:
        self.store = store
        self.gateway = gateway
        self.consolidator = consolidator
        self.config = config if config is not None else PipelineConfig()
        self.clock = clock
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _product_lock(self, product_id: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._locks.get(product_id)
            if lock is None:
                lock = self._locks[product_id] = threading.Lock()
            return lock

    def refresh_state(self, product_id: str) -> RefreshState:
        """Derive the trigger-relevant state from the store."""
        count = len(self.store.get_reviews(product_id))
        summary = self.store.get_summary(product_id)
        return RefreshState(
            product_id=product_id,
            current_review_count=count,
            count_at_last_summary=(
                summary.review_count_at_generation if summary is not None else None
            ),
        )

    def ingest(self, review: Review) -> TriggerDecision:
        """Persist one review (durably) and evaluate the trigger rules."""
        self.store.put_review(review)
        return evaluate_trigger(
            self.refresh_state(review.product_id),
            self.config.min_reviews,
            self.config.refresh_fraction,
        )

    def consolidated_results(self, product_id: str) -> list[ExtractionResult]:
        """Cached extractions for a product with the current mapping applied.

        Read-only: aspects never seen by the consolidator stay as themselves
        and no backend calls happen.
        """
        results = [
            result
            for review in self.store.get_reviews(product_id)
            if (result := self.store.get_extraction(review.review_id)) is not None
        ]
        return apply_mapping(results, self.consolidator.map)

    def run_pipeline(self, product_id: str) -> SummaryRecord:
        """Execute extract, consolidate, select, and summarize for one product.

        Either the summary record (which carries the new refresh baseline) is
        persisted, or a PipelineError identifies the failed stage and the
        observable state stays unchanged. Per-review extractions are cached
        on the way so refreshes only pay for new reviews.
        """
        with self._product_lock(product_id):
            return self._run_pipeline_locked(product_id)

    def _run_pipeline_locked(self, product_id: str) -> SummaryRecord:
        config = self.config
        reviews = self.store.get_reviews(product_id)
        if len(reviews) < config.min_reviews:
            raise PipelineError(
                "precondition",
                f"product {product_id} has {len(reviews)} reviews, "
                f"needs {config.min_reviews}",
            )
        count_at_start = len(reviews)

        pending = [r for r in reviews if self.store.get_extraction(r.review_id) is None]
        new_results, report = extract_batch(
            pending, self.gateway, parallelism=config.parallelism, clock=self.clock
        )
        for result in new_results:
            if result is not None:
                self.store.put_extraction(result)
        if report.failures:
            log.warning(
                "product %s: %d reviews failed extraction and are excluded",
                product_id,
                len(report.failures),
            )

        results = [
            result
            for review in reviews
            if (result := self.store.get_extraction(review.review_id)) is not None
        ]
        raw_aspects = sorted({m.aspect for result in results for m in result.mentions})
        self.consolidator.resolve_all(raw_aspects)
        consolidated = apply_mapping(results, self.consolidator.map)

        profile = build_profile(product_id, consolidated)
        if not profile.pair_reviews:
            raise PipelineError(
                "selection", f"product {product_id} has no extracted aspects to rank"
            )
        weighting = make_weighting(config.sampling_mode, config.half_life_days)
        selection = select_reviews(
            profile,
            reviews,
            cap=config.cap,
            seed=derive_seed(config.seed, product_id),
            weighting=weighting,
            top_k=config.top_k,
        )

        try:
            record = generate_summary(
                selection,
                reviews,
                self.gateway,
                review_count=count_at_start,
                clock=self.clock,
            )
        except Exception as exc:
            raise PipelineError("summarization", str(exc)) from exc
        self.store.put_summary(record)
        return record

    def eligible_products(self) -> list[str]:
        """Products with enough stored reviews for a pipeline run."""
        return [
            product_id
            for product_id in sorted(self.store.product_ids())
            if len(self.store.get_reviews(product_id)) >= self.config.min_reviews
        ]
