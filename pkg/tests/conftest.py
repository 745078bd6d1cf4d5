"""Shared fixtures: mock gateway wiring, fixed clock, and a synthetic product."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from aspectsum.config import PipelineConfig
from aspectsum.consolidation import Consolidator
from aspectsum.domain import Review
from aspectsum.gateway import CountingBackend, LlmGateway, MockBackend
from aspectsum.orchestrator import SummaryOrchestrator
from aspectsum.store import JournalStore

FIXED_NOW = datetime(2025, 6, 1, 12, 0, 0, tzinfo=timezone.utc)


def fixed_clock() -> datetime:
    return FIXED_NOW


def make_review(
    review_id: str,
    text: str,
    product_id: str = "p-1",
    days_ago: int = 0,
    verified: bool | None = None,
) -> Review:
    return Review(
        review_id=review_id,
        product_id=product_id,
        text=text,
        created_at=FIXED_NOW - timedelta(days=days_ago),
        verified_purchaser=verified,
    )


# Texts keyed to the mock backend's keyword rules; product "p-sofa" exercises
# extraction, consolidation (fine-grained terms), ranking, and summarization.
SOFA_TEXTS = {
    "r01": "Beautiful color but assembly took forever.",
    "r02": "Love the color and it was easy to assemble.",
    "r03": "Great value and very comfortable.",
    "r04": "Sturdy frame, good quality overall.",
    "r05": "Hard assembly, the box was damaged too.",
    "r06": "Worth the price. Fast shipping as well.",
    "r07": "Uncomfortable after an hour and wobbly legs.",
    "r08": "Good quality fabric, soft fabric feel, looks great.",
    "r09": "Decent quality but arrived late.",
    "r10": "Perfect size for our living room, stylish.",
    "r11": "Very comfortable and looks amazing.",
    "r12": "Easy assembly and great quality.",
}


def sofa_reviews(product_id: str = "p-sofa") -> list[Review]:
    return [
        make_review(review_id, text, product_id=product_id, days_ago=index)
        for index, (review_id, text) in enumerate(sorted(SOFA_TEXTS.items()))
    ]


@pytest.fixture
def mock_gateway() -> LlmGateway:
    return LlmGateway(MockBackend(), sleep=lambda _: None)


@pytest.fixture
def counting_gateway() -> tuple[LlmGateway, CountingBackend]:
    backend = CountingBackend(MockBackend())
    return LlmGateway(backend, sleep=lambda _: None), backend


@pytest.fixture
def orchestrator(mock_gateway) -> SummaryOrchestrator:
    return SummaryOrchestrator(
        store=JournalStore(),
        gateway=mock_gateway,
        consolidator=Consolidator(mock_gateway),
        config=PipelineConfig(),
        clock=fixed_clock,
    )
