"""Journal store: round trips, duplicates, and crash recovery."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from aspectsum.domain import AspectMention, ExtractionResult, Sentiment, SummaryRecord
from aspectsum.store import DuplicateReviewError, JournalStore

from conftest import FIXED_NOW, make_review


def summary_record(product_id="p-1", count=12):
    return SummaryRecord(
        product_id=product_id,
        summary_text="s" * 300,
        aspects_used=("quality",),
        review_count_at_generation=count,
        generated_at=FIXED_NOW,
        model_id="mock",
        length_ok=True,
    )


class TestJournalStore:
    def test_review_round_trip(self):
        store = JournalStore()
        review = make_review("r1", "Sturdy and stylish", verified=True)
        store.put_review(review)
        assert store.get_review("r1") == review
        assert store.get_reviews("p-1") == [review]

    def test_duplicate_review_rejected(self):
        store = JournalStore()
        store.put_review(make_review("r1", "text"))
        with pytest.raises(DuplicateReviewError):
            store.put_review(make_review("r1", "text"))

    def test_unknown_lookups_are_absent(self):
        store = JournalStore()
        assert store.get_review("nope") is None
        assert store.get_summary("nope") is None
        assert store.get_extraction("nope") is None
        assert store.get_reviews("nope") == []

    def test_extraction_round_trip(self):
        store = JournalStore()
        result = ExtractionResult(
            review_id="r1",
            mentions=(AspectMention(aspect="color", sentiment=Sentiment.POSITIVE),),
            model_id="mock",
            extracted_at=FIXED_NOW,
        )
        store.put_extraction(result)
        assert store.get_extraction("r1") == result

    def test_latest_summary_wins(self):
        store = JournalStore()
        store.put_summary(summary_record(count=10))
        store.put_summary(summary_record(count=15))
        assert store.get_summary("p-1").review_count_at_generation == 15

    def test_reload_reproduces_state(self, tmp_path):
        path = tmp_path / "journal.jsonl"
        store = JournalStore(path)
        for i in range(5):
            store.put_review(make_review(f"r{i}", f"sturdy item {i}"))
        store.put_extraction(
            ExtractionResult(
                review_id="r0",
                mentions=(AspectMention(aspect="sturdiness", sentiment=Sentiment.POSITIVE),),
                model_id="mock",
                extracted_at=FIXED_NOW,
            )
        )
        store.put_summary(summary_record(count=5))
        store.close()

        reloaded = JournalStore(path)
        assert len(reloaded.get_reviews("p-1")) == 5
        assert reloaded.get_extraction("r0") is not None
        assert reloaded.get_summary("p-1") == summary_record(count=5)
        assert reloaded.product_ids() == ["p-1"]

    def test_reload_preserves_trigger_inputs(self, tmp_path):
        # A reloaded store must yield the same refresh state, hence the same
        # trigger decisions, as the uninterrupted run.
        from aspectsum.orchestrator import evaluate_trigger
        from aspectsum.orchestrator import SummaryOrchestrator
        from aspectsum.config import PipelineConfig
        from aspectsum.consolidation import Consolidator
        from aspectsum.gateway import LlmGateway, MockBackend

        path = tmp_path / "journal.jsonl"
        gateway = LlmGateway(MockBackend(), sleep=lambda _: None)

        def build(store):
            return SummaryOrchestrator(
                store, gateway, Consolidator(gateway), PipelineConfig()
            )

        live = build(JournalStore(path))
        for i in range(11):
            live.ingest(make_review(f"r{i}", f"sturdy item {i}"))
        live.store.put_summary(summary_record(count=11))
        state_live = live.refresh_state("p-1")
        live.store.close()

        recovered = build(JournalStore(path))
        state_recovered = recovered.refresh_state("p-1")
        assert state_recovered == state_live
        assert evaluate_trigger(state_recovered) == evaluate_trigger(state_live)
