"""Offline evaluation: error taxonomy, majority vote, and distribution reports."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, Iterable, Mapping, Optional, Sequence

from .domain import MAJOR_LABELS, AnnotationRecord, ErrorLabel

LabelSet = frozenset[ErrorLabel]

ANNOTATION_COLUMNS = ("product_id", "annotator_id", "labels", "reason")


def _validate_label_set(labels: AbstractSet[ErrorLabel]) -> LabelSet:
    if not labels:
        raise ValueError("label set must be non-empty")
    if ErrorLabel.NO_ERRORS in labels and len(labels) > 1:
        raise ValueError("NO_ERRORS excludes every other label")
    return frozenset(labels)


def majority_vote(label_sets: Sequence[AbstractSet[ErrorLabel]]) -> Optional[LabelSet]:
    """Labels assigned by at least two annotators; None means no majority."""
    if len(label_sets) < 2:
        raise ValueError("majority vote needs at least two annotators")
    votes: Counter[ErrorLabel] = Counter()
    for labels in label_sets:
        votes.update(_validate_label_set(labels))
    agreed = frozenset(label for label, count in votes.items() if count >= 2)
    return agreed or None


def agreement_rate(items: Sequence[Sequence[AbstractSet[ErrorLabel]]]) -> float:
    """Fraction of multi-annotated items where the majority vote is non-empty."""
    if not items:
        raise ValueError("agreement rate needs at least one item")
    agreed = sum(1 for label_sets in items if majority_vote(label_sets) is not None)
    return agreed / len(items)


def classify_severity(labels: AbstractSet[ErrorLabel]) -> str:
    """Severity tier of one final label set: no_error, minor, or major."""
    validated = _validate_label_set(labels)
    if validated == {ErrorLabel.NO_ERRORS}:
        return "no_error"
    if validated & MAJOR_LABELS:
        return "major"
    return "minor"


@dataclass(frozen=True)
class DistributionReport:
    total: int
    tier_counts: Mapping[str, int]
    tier_percentages: Mapping[str, int]
    label_counts: Mapping[ErrorLabel, int]

    def as_text(self) -> str:
        lines = ["tier\tcount\tpercent"]
        for tier in ("no_error", "minor", "major"):
            lines.append(f"{tier}\t{self.tier_counts[tier]}\t{self.tier_percentages[tier]}")
        lines.append("")
        lines.append("label\tcount")
        for label in ErrorLabel:
            count = self.label_counts.get(label, 0)
            if count:
                lines.append(f"{label.value}\t{count}")
        return "\n".join(lines)


def error_distribution(
    final_label_sets: Iterable[AbstractSet[ErrorLabel]],
    total_products: Optional[int] = None,
) -> DistributionReport:
    """Tier and per-label counts over one final label set per product.

    A product carrying both minor and major labels counts as major
    (max-severity rule). Percentages are whole percent of ``total_products``,
    which may exceed the number of label sets when no-majority products were
    excluded from the finals but still count toward the evaluated total.
    """
    tier_counts = {"no_error": 0, "minor": 0, "major": 0}
    label_counts: Counter[ErrorLabel] = Counter()
    labeled = 0
    for labels in final_label_sets:
        tier_counts[classify_severity(labels)] += 1
        label_counts.update(_validate_label_set(labels))
        labeled += 1
    total = total_products if total_products is not None else labeled
    if total < labeled:
        raise ValueError("total_products cannot be below the number of label sets")
    percentages = {
        tier: (round(100.0 * count / total) if total else 0)
        for tier, count in tier_counts.items()
    }
    return DistributionReport(
        total=total,
        tier_counts=tier_counts,
        tier_percentages=percentages,
        label_counts=dict(label_counts),
    )


@dataclass
class AnnotationLoadReport:
    rejects: list[tuple[int, str]] = field(default_factory=list)


def load_annotations(path: str | Path) -> tuple[list[AnnotationRecord], AnnotationLoadReport]:
    """Read annotation rows from CSV; rows with unknown labels are rejected."""
    report = AnnotationLoadReport()
    records: list[AnnotationRecord] = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in ANNOTATION_COLUMNS if col not in header]
        if missing:
            raise ValueError(f"{path}: missing required columns {missing}")
        for number, row in enumerate(reader, start=2):
            try:
                labels = frozenset(
                    ErrorLabel(token.strip())
                    for token in (row.get("labels") or "").split(";")
                    if token.strip()
                )
                records.append(
                    AnnotationRecord(
                        product_id=(row.get("product_id") or "").strip(),
                        annotator_id=(row.get("annotator_id") or "").strip(),
                        labels=labels,
                        reason=row.get("reason") or "",
                    )
                )
            except ValueError as exc:
                report.rejects.append((number, str(exc)))
    return records, report


def save_annotations(path: str | Path, records: Iterable[AnnotationRecord]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_ALL)
        writer.writerow(ANNOTATION_COLUMNS)
        for record in records:
            writer.writerow(
                [
                    record.product_id,
                    record.annotator_id,
                    ";".join(sorted(label.value for label in record.labels)),
                    record.reason,
                ]
            )


def resolve_final_labels(
    records: Iterable[AnnotationRecord],
) -> tuple[dict[str, LabelSet], list[str]]:
    """Per-product final label sets: single annotations pass through,
    multi-annotated products go through majority vote. Returns the finals and
    the products left without a majority (excluded from distributions).
    """
    by_product: dict[str, list[AnnotationRecord]] = {}
    for record in records:
        by_product.setdefault(record.product_id, []).append(record)
    finals: dict[str, LabelSet] = {}
    no_majority: list[str] = []
    for product_id, product_records in sorted(by_product.items()):
        if len(product_records) == 1:
            finals[product_id] = product_records[0].labels
            continue
        agreed = majority_vote([r.labels for r in product_records])
        if agreed is None:
            no_majority.append(product_id)
        else:
            finals[product_id] = agreed
    return finals, no_majority
