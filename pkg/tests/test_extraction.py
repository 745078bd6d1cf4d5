"""Extraction stage: per-review results, batching, and failure handling."""

from __future__ import annotations

import pytest

from aspectsum.domain import Sentiment, normalize_aspect
from aspectsum.extraction import ExtractionFailed, extract_aspects, extract_batch
from aspectsum.gateway import CountingBackend, LlmGateway, MockBackend, TemplateId
from aspectsum.gateway.core import TransientError

from conftest import fixed_clock, make_review


def pairs(result):
    return [(m.aspect, m.sentiment) for m in result.mentions]


class TestExtractAspects:
    def test_keyword_fixture_pairs(self, mock_gateway):
        review = make_review("r1", "Beautiful color but assembly took forever")
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        assert pairs(result) == [
            ("color", Sentiment.POSITIVE),
            ("assembly", Sentiment.NEGATIVE),
        ]

    def test_no_signal_review_yields_no_mentions(self, mock_gateway):
        review = make_review("r1", "It exists and was delivered to my house.")
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        assert result.mentions == ()

    def test_fine_grained_terms_survive_extraction(self, mock_gateway):
        # Consolidation, not extraction, is what maps these to broader forms.
        # The mock emits matches in rule-table order.
        review = make_review("r1", "Great value but hard assembly")
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        assert pairs(result) == [
            ("assembly time", Sentiment.NEGATIVE),
            ("value for money", Sentiment.POSITIVE),
        ]

    def test_more_than_five_matches_keeps_first_five(self, mock_gateway):
        review = make_review(
            "r1",
            "love the color, hard assembly, great value, fast shipping, "
            "box was damaged, very comfortable, sturdy",
        )
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        assert len(result.mentions) == 5
        assert [m.aspect for m in result.mentions] == [
            "color",
            "assembly time",
            "value for money",
            "shipping speed",
            "packaging condition",
        ]

    def test_duplicate_aspect_keeps_first_sentiment(self, mock_gateway):
        # "uncomfortable" matches both the negative and positive comfort rules.
        review = make_review("r1", "so uncomfortable")
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        assert pairs(result) == [("comfort", Sentiment.NEGATIVE)]

    def test_mentions_are_normalized(self, mock_gateway):
        review = make_review("r1", "Great VALUE and fast shipping")
        result = extract_aspects(review, mock_gateway, clock=fixed_clock)
        for mention in result.mentions:
            assert mention.aspect == normalize_aspect(mention.aspect)

    def test_malformed_output_retried_once_then_fails(self):
        backend = CountingBackend(MockBackend())
        gateway = LlmGateway(backend, sleep=lambda _: None)
        review = make_review("r1", "nice ##break-json## product")
        with pytest.raises(ExtractionFailed):
            extract_aspects(review, gateway, clock=fixed_clock)
        assert backend.calls_by_template[TemplateId.ASPECT_EXTRACTION] == 2

    def test_gateway_exhaustion_fails_review(self):
        class Exploding:
            backend_id = "exploding"

            def send(self, call):
                raise TransientError("down")

        gateway = LlmGateway(Exploding(), max_attempts=2, sleep=lambda _: None)
        with pytest.raises(ExtractionFailed):
            extract_aspects(make_review("r1", "sturdy"), gateway, clock=fixed_clock)

    def test_model_id_comes_from_backend(self, mock_gateway):
        result = extract_aspects(make_review("r1", "sturdy"), mock_gateway, clock=fixed_clock)
        assert result.model_id == "mock"


class TestExtractBatch:
    def _reviews(self, n=100):
        return [make_review(f"r{i:03d}", f"sturdy item number {i}") for i in range(n)]

    def test_order_preserved(self, mock_gateway):
        reviews = self._reviews(100)
        results, report = extract_batch(reviews, mock_gateway, parallelism=8, clock=fixed_clock)
        assert [r.review_id for r in results] == [r.review_id for r in reviews]
        assert report.failures == ()

    def test_parallelism_does_not_change_output(self, mock_gateway):
        reviews = self._reviews(40)
        serial, _ = extract_batch(reviews, mock_gateway, parallelism=1, clock=fixed_clock)
        parallel, _ = extract_batch(reviews, mock_gateway, parallelism=8, clock=fixed_clock)
        assert serial == parallel

    def test_poisoned_review_reported_not_fatal(self, mock_gateway):
        reviews = self._reviews(19)
        reviews.insert(7, make_review("rbad", "fine ##break-json## fine"))
        results, report = extract_batch(reviews, mock_gateway, parallelism=4, clock=fixed_clock)
        assert sum(1 for r in results if r is not None) == 19
        assert results[7] is None
        assert report.failed_review_ids == ("rbad",)

    def test_empty_batch(self, mock_gateway):
        results, report = extract_batch([], mock_gateway, clock=fixed_clock)
        assert results == []
        assert report.failures == ()

    def test_parallelism_must_be_positive(self, mock_gateway):
        with pytest.raises(ValueError):
            extract_batch([], mock_gateway, parallelism=0)
