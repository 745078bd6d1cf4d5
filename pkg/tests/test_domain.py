"""Domain type invariants and aspect normalization."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aspectsum.domain import (
    AnnotationRecord,
    AspectMention,
    ConsolidationMap,
    ErrorLabel,
    ExtractionResult,
    RefreshState,
    Review,
    Sentiment,
    normalize_aspect,
)

UTC_NOW = datetime(2025, 6, 1, tzinfo=timezone.utc)


class TestNormalizeAspect:
    def test_casefolds_and_collapses_whitespace(self):
        assert normalize_aspect("  Value For  Money") == "value for money"

    def test_fixed_point(self):
        assert normalize_aspect("comfort") == "comfort"

    def test_mixed_case(self):
        assert normalize_aspect("Shipping Speed") == "shipping speed"

    def test_tabs_and_newlines_collapse(self):
        assert normalize_aspect("seat\tcomfort\nlevel") == "seat comfort level"

    @given(st.text(max_size=60))
    def test_idempotent(self, raw):
        once = normalize_aspect(raw)
        assert normalize_aspect(once) == once


class TestSentiment:
    @pytest.mark.parametrize("label", ["positive", "Positive", "POSITIVE", " positive "])
    def test_case_insensitive(self, label):
        assert Sentiment.from_label(label) is Sentiment.POSITIVE

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError):
            Sentiment.from_label("great")

    def test_exactly_three_values(self):
        assert {s.value for s in Sentiment} == {"positive", "negative", "mixed"}


class TestReview:
    def test_blank_text_rejected(self):
        with pytest.raises(ValueError):
            Review(review_id="r", product_id="p", text="   ", created_at=UTC_NOW)

    def test_naive_timestamp_rejected(self):
        with pytest.raises(ValueError):
            Review(review_id="r", product_id="p", text="ok", created_at=datetime(2025, 1, 1))

    def test_timestamp_converted_to_utc(self):
        from datetime import timedelta, timezone as tz

        offset = tz(timedelta(hours=2))
        review = Review(
            review_id="r",
            product_id="p",
            text="ok",
            created_at=datetime(2025, 1, 1, 12, tzinfo=offset),
        )
        assert review.created_at.tzinfo == timezone.utc
        assert review.created_at.hour == 10


class TestAspectMention:
    def test_requires_normalized_aspect(self):
        with pytest.raises(ValueError):
            AspectMention(aspect="Shipping Speed", sentiment=Sentiment.POSITIVE)

    def test_empty_aspect_rejected(self):
        with pytest.raises(ValueError):
            AspectMention(aspect="", sentiment=Sentiment.POSITIVE)


class TestExtractionResult:
    def _mentions(self, n):
        return tuple(
            AspectMention(aspect=f"aspect {i}", sentiment=Sentiment.POSITIVE) for i in range(n)
        )

    def test_at_most_five_mentions(self):
        with pytest.raises(ValueError):
            ExtractionResult(
                review_id="r", mentions=self._mentions(6), model_id="m", extracted_at=UTC_NOW
            )

    def test_duplicate_aspects_rejected(self):
        mention = AspectMention(aspect="color", sentiment=Sentiment.POSITIVE)
        dup = AspectMention(aspect="color", sentiment=Sentiment.NEGATIVE)
        with pytest.raises(ValueError):
            ExtractionResult(
                review_id="r", mentions=(mention, dup), model_id="m", extracted_at=UTC_NOW
            )


class TestConsolidationMap:
    def test_register_keeps_fixed_points(self):
        cmap = ConsolidationMap()
        cmap.register("value for money", "price")
        assert cmap.entries["price"] == "price"
        assert cmap.entries["value for money"] == "price"
        cmap.check_invariants()

    def test_register_collapses_existing_chain(self):
        cmap = ConsolidationMap()
        cmap.register("b", "c")
        cmap.register("a", "b")
        assert cmap.entries["a"] == "c"
        cmap.check_invariants()

    def test_follow_handles_cycle(self):
        cmap = ConsolidationMap()
        cmap.entries = {"a": "b", "b": "a"}
        assert cmap.follow("a") == "a"  # smallest member of the cycle

    def test_canonical_for_unseen_is_none(self):
        assert ConsolidationMap().canonical_for("novel") is None


class TestRefreshState:
    def test_has_summary_tracks_baseline(self):
        assert not RefreshState(product_id="p", current_review_count=3).has_summary
        assert RefreshState(
            product_id="p", current_review_count=12, count_at_last_summary=10
        ).has_summary

    def test_baseline_cannot_exceed_count(self):
        with pytest.raises(ValueError):
            RefreshState(product_id="p", current_review_count=5, count_at_last_summary=6)

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            RefreshState(product_id="p", current_review_count=-1)


class TestAnnotationRecord:
    def test_no_errors_is_exclusive(self):
        with pytest.raises(ValueError):
            AnnotationRecord(
                product_id="p",
                annotator_id="a",
                labels=frozenset({ErrorLabel.NO_ERRORS, ErrorLabel.MINOR_OMISSION}),
            )

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError):
            AnnotationRecord(product_id="p", annotator_id="a", labels=frozenset())

    def test_multi_label_allowed(self):
        record = AnnotationRecord(
            product_id="p",
            annotator_id="a",
            labels=frozenset({ErrorLabel.MAJOR_OMISSION, ErrorLabel.MINOR_OMISSION}),
        )
        assert len(record.labels) == 2
