"""Command-line entry points for the pipeline, analytics, and service."""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .config import PipelineConfig, load_config
from .consolidation import Consolidator
from .dataset_io import (
    DatasetError,
    compute_corpus_stats,
    format_stats_report,
    load_reviews_table,
)
from .domain import ExtractionResult
from .evaluation import error_distribution, load_annotations, resolve_final_labels
from .gateway import gateway_from_config
from .orchestrator import PipelineError, SummaryOrchestrator
from .store import DuplicateReviewError, JournalStore


def _build_orchestrator(config: PipelineConfig) -> SummaryOrchestrator:
    gateway = gateway_from_config(config)
    consolidator = Consolidator(
        gateway,
        store_path=config.mapping_store_path,
        batch_size=config.consolidation_batch_size,
    )
    if config.store_path is None:
        print(
            "warning: no store_path configured; state will not survive this process",
            file=sys.stderr,
        )
    store = JournalStore(config.store_path)
    return SummaryOrchestrator(store, gateway, consolidator, config)


def _cmd_ingest(args: argparse.Namespace, config: PipelineConfig) -> int:
    orchestrator = _build_orchestrator(config)
    try:
        records, report = load_reviews_table(args.file)
    except DatasetError as exc:
        print(exc, file=sys.stderr)
        return 1
    ingested = 0
    duplicates = 0
    triggered: dict[str, str] = {}
    for review, mentions in records:
        try:
            decision = orchestrator.ingest(review)
        except DuplicateReviewError:
            duplicates += 1
            continue
        ingested += 1
        if mentions and orchestrator.store.get_extraction(review.review_id) is None:
            # Rows shipped with pre-extracted aspects seed the extraction cache.
            orchestrator.store.put_extraction(
                ExtractionResult(
                    review_id=review.review_id,
                    mentions=mentions,
                    model_id="imported",
                    extracted_at=datetime(1970, 1, 1, tzinfo=timezone.utc),
                )
            )
        if decision.triggered:
            triggered[review.product_id] = decision.action.value
    print(f"ingested {ingested} reviews ({duplicates} duplicates skipped)")
    for row in report.rejects:
        print(f"rejected row {row.row_number}: {row.reason}", file=sys.stderr)
    for product_id, action in sorted(triggered.items()):
        print(f"trigger {action} for product {product_id}")
    return 0


def _cmd_run(args: argparse.Namespace, config: PipelineConfig) -> int:
    orchestrator = _build_orchestrator(config)
    try:
        record = orchestrator.run_pipeline(args.product_id)
    except PipelineError as exc:
        print(exc, file=sys.stderr)
        return 1
    print(f"product {record.product_id}: {len(record.summary_text)} chars, "
          f"aspects: {', '.join(record.aspects_used)}")
    print(record.summary_text)
    return 0


def _cmd_batch_run(args: argparse.Namespace, config: PipelineConfig) -> int:
    orchestrator = _build_orchestrator(config)
    failures = 0
    for product_id in orchestrator.eligible_products():
        try:
            record = orchestrator.run_pipeline(product_id)
        except PipelineError as exc:
            failures += 1
            print(f"{product_id}: {exc}", file=sys.stderr)
            continue
        print(f"{product_id}: summary of {len(record.summary_text)} chars")
    return 1 if failures else 0


def _cmd_stats(args: argparse.Namespace, config: PipelineConfig) -> int:
    try:
        records, report = load_reviews_table(args.file)
    except DatasetError as exc:
        print(exc, file=sys.stderr)
        return 1
    for row in report.rejects:
        print(f"rejected row {row.row_number}: {row.reason}", file=sys.stderr)
    print(format_stats_report(compute_corpus_stats(records), k=args.top))
    return 0


def _cmd_eval(args: argparse.Namespace, config: PipelineConfig) -> int:
    try:
        records, report = load_annotations(args.file)
    except (OSError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return 1
    for number, reason in report.rejects:
        print(f"rejected row {number}: {reason}", file=sys.stderr)
    if not records:
        print("no valid annotation rows", file=sys.stderr)
        return 1
    finals, no_majority = resolve_final_labels(records)
    report = error_distribution(
        finals.values(), total_products=len(finals) + len(no_majority)
    )
    print(report.as_text())
    if no_majority:
        print(f"\nno_majority\t{len(no_majority)}")
    return 0


def _cmd_serve(args: argparse.Namespace, config: PipelineConfig) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(_build_orchestrator(config))
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="aspectsum", description="Aspect-guided review summarization"
    )
    parser.add_argument("--config", type=Path, default=None, help="key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load a reviews table into the store")
    p_ingest.add_argument("file", type=Path)
    p_ingest.set_defaults(func=_cmd_ingest)

    p_run = sub.add_parser("run", help="run the pipeline for one product")
    p_run.add_argument("product_id")
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch-run", help="run the pipeline for every eligible product")
    p_batch.set_defaults(func=_cmd_batch_run)

    p_stats = sub.add_parser("stats", help="corpus statistics for a reviews table")
    p_stats.add_argument("file", type=Path)
    p_stats.add_argument("--top", type=int, default=10)
    p_stats.set_defaults(func=_cmd_stats)

    p_eval = sub.add_parser("eval", help="error distribution for an annotations CSV")
    p_eval.add_argument("file", type=Path)
    p_eval.set_defaults(func=_cmd_eval)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    config = load_config(args.config) if args.config else PipelineConfig()
    return args.func(args, config)


if __name__ == "__main__":
    sys.exit(main())
