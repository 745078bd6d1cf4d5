"""HTTP service exposing ingestion, summaries, aspect profiles, and filtering."""

from __future__ import annotations

import logging
import threading
from datetime import datetime
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .domain import Review, Sentiment
from .orchestrator import PipelineError, SummaryOrchestrator
from .selection import build_profile, top_aspects
from .serde import dt_to_iso, review_to_dict, summary_to_dict
from .store import DuplicateReviewError

log = logging.getLogger(__name__)

PAGE_SIZE = 20


class ReviewIn(BaseModel):
    review_id: str = Field(min_length=1)
    text: str = Field(min_length=1)
    created_at: datetime
    verified_purchaser: Optional[bool] = None
    language: Optional[str] = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(orchestrator: SummaryOrchestrator) -> FastAPI:
    app = FastAPI(title="aspectsum", version="0.1.0")
    config = orchestrator.config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin] if config.cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "invalid_body", str(exc.errors()[:3]))

    def _run_pipeline(product_id: str) -> Optional[str]:
        try:
            orchestrator.run_pipeline(product_id)
            return None
        except PipelineError as exc:
            log.warning("pipeline for %s failed: %s", product_id, exc)
            return str(exc)

    @app.post("/products/{product_id}/reviews", status_code=202)
    def ingest_review(product_id: str, body: ReviewIn):
        try:
            review = Review(
                review_id=body.review_id,
                product_id=product_id,
                text=body.text,
                created_at=body.created_at,
                verified_purchaser=body.verified_purchaser,
                language=body.language,
            )
            decision = orchestrator.ingest(review)
        except DuplicateReviewError as exc:
            return _error(409, "duplicate_review", str(exc))
        except ValueError as exc:
            return _error(400, "invalid_body", str(exc))
        payload = {
            "accepted": True,
            "trigger": decision.action.value,
            "reason": decision.reason,
            "pipeline": None,
        }
        if decision.triggered:
            if config.synchronous_pipeline:
                error = _run_pipeline(product_id)
                payload["pipeline"] = "failed: " + error if error else "completed"
            else:
                threading.Thread(
                    target=_run_pipeline, args=(product_id,), daemon=True
                ).start()
                payload["pipeline"] = "scheduled"
        return payload

    @app.get("/products/{product_id}/summary")
    def get_summary(product_id: str):
        record = orchestrator.store.get_summary(product_id)
        if record is None:
            return _error(404, "not_found", f"no summary for product {product_id!r}")
        return summary_to_dict(record)

    @app.get("/products/{product_id}/aspects")
    def get_aspects(product_id: str):
        results = orchestrator.consolidated_results(product_id)
        profile = build_profile(product_id, results)
        if not profile.pair_reviews:
            return _error(404, "not_found", f"no aspect profile for product {product_id!r}")
        counts = profile.pair_counts
        aspects = []
        for aspect in top_aspects(profile, k=config.top_k):
            by_sentiment = {
                sentiment.value: counts.get((aspect, sentiment), 0) for sentiment in Sentiment
            }
            aspects.append(
                {
                    "aspect": aspect,
                    "total": sum(by_sentiment.values()),
                    "counts": by_sentiment,
                }
            )
        return {"product_id": product_id, "aspects": aspects}

    @app.get("/products/{product_id}/reviews")
    def list_reviews(
        product_id: str,
        aspect: Optional[str] = None,
        sentiment: Optional[str] = None,
        page: int = 1,
    ):
        parsed_sentiment: Optional[Sentiment] = None
        if sentiment is not None:
            try:
                parsed_sentiment = Sentiment.from_label(sentiment)
            except ValueError as exc:
                return _error(400, "invalid_sentiment", str(exc))
        if page < 1:
            return _error(400, "invalid_page", "page starts at 1")

        reviews = orchestrator.store.get_reviews(product_id)
        if aspect is not None:
            matching: set[str] = set()
            for result in orchestrator.consolidated_results(product_id):
                for mention in result.mentions:
                    if mention.aspect != aspect:
                        continue
                    if parsed_sentiment is None or mention.sentiment is parsed_sentiment:
                        matching.add(result.review_id)
            reviews = [r for r in reviews if r.review_id in matching]

        reviews.sort(key=lambda r: (r.created_at, r.review_id), reverse=True)
        start = (page - 1) * PAGE_SIZE
        page_rows = reviews[start : start + PAGE_SIZE]
        return {
            "product_id": product_id,
            "page": page,
            "page_size": PAGE_SIZE,
            "total": len(reviews),
            "reviews": [
                {**review_to_dict(r), "created_at": dt_to_iso(r.created_at)}
                for r in page_rows
            ],
        }

    return app
