"""Stage 2: map rare raw aspects to canonical forms with a persistent cache."""

from __future__ import annotations

import logging
import math
import threading
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .domain import (
    AspectMention,
    ConsolidationMap,
    ExtractionResult,
    Sentiment,
    normalize_aspect,
)
from .gateway import LlmGateway, SchemaId, TemplateId
from .gateway.errors import GatewayError, MalformedOutput

log = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 100


def build_frequency_table(results: Iterable[ExtractionResult]) -> dict[str, int]:
    """Count mention occurrences per raw aspect across all results."""
    table: dict[str, int] = {}
    for result in results:
        for mention in result.mentions:
            table[mention.aspect] = table.get(mention.aspect, 0) + 1
    return table


def compute_threshold(freq_table: Mapping[str, int], percentile: float = 0.95) -> int:
    """Nearest-rank percentile of the per-aspect frequency multiset.

    Frequencies are sorted ascending and the value at 1-indexed rank
    ceil(percentile * n) is returned. The percentile is interpreted through
    its decimal representation so that e.g. 0.95 * 20 ranks as exactly 19.
    """
    if not freq_table:
        raise ValueError("cannot compute a threshold from an empty frequency table")
    if not 0 < percentile <= 1:
        raise ValueError("percentile must be in (0, 1]")
    freqs = sorted(freq_table.values())
    n = len(freqs)
    rank = math.ceil(Fraction(str(percentile)) * n)
    rank = min(max(rank, 1), n)
    return freqs[rank - 1]


def apply_mapping(
    results: Iterable[ExtractionResult],
    cmap: ConsolidationMap,
) -> list[ExtractionResult]:
    """Replace every mention's aspect by its canonical form.

    Mentions that collide after mapping are merged within a review: the
    sentiment is kept when all sources agree, otherwise it becomes MIXED.
    Unseen aspects fall back to themselves; no backend calls happen here.
    """
    consolidated: list[ExtractionResult] = []
    for result in results:
        ordered: list[str] = []
        sentiments: dict[str, list[Sentiment]] = {}
        for mention in result.mentions:
            canonical = cmap.entries.get(mention.aspect, mention.aspect)
            if canonical not in sentiments:
                ordered.append(canonical)
                sentiments[canonical] = []
            sentiments[canonical].append(mention.sentiment)
        mentions = tuple(
            AspectMention(
                aspect=aspect,
                sentiment=(
                    sentiments[aspect][0]
                    if len(set(sentiments[aspect])) == 1
                    else Sentiment.MIXED
                ),
            )
            for aspect in ordered
        )
        consolidated.append(
            ExtractionResult(
                review_id=result.review_id,
                mentions=mentions,
                model_id=result.model_id,
                extracted_at=result.extracted_at,
            )
        )
    return consolidated


class MappingStore:
    """Append-only TSV log of ``raw<TAB>canonical<TAB>version`` records.

    The last record per raw aspect wins on load; the file is rewritten in
    compacted form when stale records are found.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def load(self) -> tuple[dict[str, str], int]:
        entries: dict[str, str] = {}
        version = 0
        records = 0
        if not self.path.exists():
            return entries, version
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            raw, canonical, version_text = line.split("\t")
            entries[raw] = canonical
            version = max(version, int(version_text))
            records += 1
        if records > len(entries):
            self.rewrite(entries, version)
        return entries, version

    def append(self, pairs: Iterable[tuple[str, str]], version: int) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            for raw, canonical in pairs:
                fh.write(f"{raw}\t{canonical}\t{version}\n")
            fh.flush()

    def rewrite(self, entries: Mapping[str, str], version: int) -> None:
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for raw in sorted(entries):
                fh.write(f"{raw}\t{entries[raw]}\t{version}\n")
        tmp.replace(self.path)


class Consolidator:
    """Owns a ConsolidationMap: cached lookups, backend calls for unseen aspects.

    Cached resolution is a lock-free read; insertion of unseen aspects
    serializes through one writer lock so each distinct aspect triggers at
    most one backend call over the lifetime of the map.
    """

    def __init__(
        self,
        gateway: LlmGateway,
        cmap: Optional[ConsolidationMap] = None,
        store_path: Optional[str | Path] = None,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ) -> None:
        self.gateway = gateway
        self.map = cmap if cmap is not None else ConsolidationMap()
        self.batch_size = batch_size
        self._lock = threading.Lock()
        self._store = MappingStore(store_path) if store_path is not None else None
        if self._store is not None:
            entries, version = self._store.load()
            self.map.entries.update(entries)
            self.map.version = max(self.map.version, version)

    def _call_backend(self, aspects: Sequence[str]) -> dict[str, str]:
        bindings = {"aspects": "\n".join(f"- {aspect}" for aspect in aspects)}
        outcome = self.gateway.run(TemplateId.ASPECT_CONSOLIDATION, bindings, SchemaId.CONSOLIDATION)
        assert outcome.parsed is not None
        returned: dict[str, str] = {}
        for raw, canonical in outcome.parsed:
            returned[normalize_aspect(raw)] = normalize_aspect(canonical)
        return returned

    def _register_pairs(self, pairs: Mapping[str, str]) -> None:
        for raw, canonical in pairs.items():
            self.map.register(raw, canonical or raw)

    def _persist(self, raws: Iterable[str]) -> None:
        if self._store is not None:
            self._store.append(
                ((raw, self.map.entries[raw]) for raw in raws), self.map.version
            )

    def resolve(self, aspect: str) -> str:
        """Canonical form for one aspect, calling the backend only when unseen."""
        cached = self.map.canonical_for(aspect)
        if cached is not None:
            return cached
        with self._lock:
            cached = self.map.canonical_for(aspect)
            if cached is not None:
                return cached
            try:
                returned = self._call_backend([aspect])
                canonical = returned.get(aspect, aspect)
            except (GatewayError, MalformedOutput) as exc:
                log.warning("consolidation failed for %r, keeping identity: %s", aspect, exc)
                self.map.register(aspect, aspect)
                self.map.needs_reconsolidation.add(aspect)
                self._persist([aspect])
                return aspect
            terminal = self.map.register(aspect, canonical or aspect)
            self._persist(sorted({aspect, terminal}))
            return terminal

    def resolve_all(self, aspects: Iterable[str]) -> dict[str, str]:
        """Resolve many aspects, batching backend calls for the unseen ones."""
        aspects = list(dict.fromkeys(aspects))
        resolved: dict[str, str] = {}
        unseen: list[str] = []
        for aspect in aspects:
            cached = self.map.canonical_for(aspect)
            if cached is not None:
                resolved[aspect] = cached
            else:
                unseen.append(aspect)
        if unseen:
            with self._lock:
                still_unseen = [a for a in unseen if a not in self.map.entries]
                self._consolidate_unseen(still_unseen)
            for aspect in unseen:
                resolved[aspect] = self.map.entries[aspect]
        return resolved

    def _consolidate_unseen(self, unseen: Sequence[str]) -> None:
        """Send unseen aspects to the backend in chunks; callers hold the lock.

        Chains can only involve aspects registered during this run, so the
        final compression pass over ``unseen`` restores the fixed-point
        property before anything is persisted.
        """
        for start in range(0, len(unseen), self.batch_size):
            chunk = unseen[start : start + self.batch_size]
            try:
                returned = self._call_backend(chunk)
            except (GatewayError, MalformedOutput) as exc:
                log.warning(
                    "consolidation chunk of %d aspects failed, keeping identities: %s",
                    len(chunk),
                    exc,
                )
                self._register_pairs({aspect: aspect for aspect in chunk})
                self.map.needs_reconsolidation.update(chunk)
                continue
            pairs = {aspect: returned.get(aspect, aspect) for aspect in chunk}
            missing = [aspect for aspect in chunk if aspect not in returned]
            if missing:
                self.map.needs_reconsolidation.update(missing)
            self._register_pairs(pairs)
        for raw in unseen:
            self.map.entries[raw] = self.map.follow(raw)
        touched = set(unseen) | {self.map.entries[raw] for raw in unseen}
        self._persist(sorted(touched))

    def consolidate_batch(self, freq_table: Mapping[str, int]) -> ConsolidationMap:
        """Fit the map to a frequency table: frequent aspects stay themselves,
        rare uncached ones go to the backend, and the version advances once.
        """
        if self.map.threshold is None:
            raise ValueError("map.threshold must be set (compute_threshold or config)")
        threshold = self.map.threshold
        with self._lock:
            self.map.frequency.update(freq_table)
            frequent = [a for a, count in freq_table.items() if count >= threshold]
            for aspect in frequent:
                self.map.entries[aspect] = aspect
            rare_unseen = [
                a
                for a, count in freq_table.items()
                if count < threshold and a not in self.map.entries
            ]
            self._consolidate_unseen(rare_unseen)
            self.map.version += 1
            if self._store is not None:
                self._store.rewrite(self.map.entries, self.map.version)
        return self.map
