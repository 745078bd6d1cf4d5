"""Stage 3: rank aspects per product and weighted-sample supporting reviews."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .domain import ExtractionResult, ProductAspectProfile, Review, SelectionResult, Sentiment

DEFAULT_CAP = 200
DEFAULT_TOP_K = 5
MIN_WEIGHT = 1e-12

SENTIMENT_ORDER = (Sentiment.POSITIVE, Sentiment.NEGATIVE, Sentiment.MIXED)

Weighting = Callable[[Review], float]


class SplitMix64:
    """splitmix64: a tiny 64-bit PRNG with identical streams on every platform."""

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)


def build_profile(
    product_id: str, results: Iterable[ExtractionResult]
) -> ProductAspectProfile:
    """Count, per (canonical aspect, sentiment) pair, the reviews mentioning it."""
    pair_ids: dict[tuple[str, Sentiment], set[str]] = {}
    contributing: set[str] = set()
    for result in results:
        if result.mentions:
            contributing.add(result.review_id)
        for mention in result.mentions:
            pair_ids.setdefault((mention.aspect, mention.sentiment), set()).add(
                result.review_id
            )
    return ProductAspectProfile(
        product_id=product_id,
        pair_reviews={pair: tuple(sorted(ids)) for pair, ids in pair_ids.items()},
        review_count=len(contributing),
    )


def top_aspects(profile: ProductAspectProfile, k: int = DEFAULT_TOP_K) -> list[str]:
    """Aspects ranked by total count across sentiments; ties break lexicographically."""
    totals = profile.aspect_totals()
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    return [aspect for aspect, _ in ranked[:k]]


def make_weighting(
    mode: str = "uniform",
    half_life_days: float = 180.0,
    now: Optional[datetime] = None,
) -> Weighting:
    """Build the configured review-weighting function.

    ``recency`` halves a review's weight per ``half_life_days`` of age;
    ``recency+verified`` additionally doubles verified-purchaser reviews.
    """
    if mode == "uniform":
        return lambda review: 1.0
    reference = now if now is not None else datetime.now(timezone.utc)

    def recency(review: Review) -> float:
        age_days = max((reference - review.created_at).total_seconds(), 0.0) / 86400.0
        return 2.0 ** (-age_days / half_life_days)

    if mode == "recency":
        return recency
    if mode == "recency+verified":
        return lambda review: recency(review) * (2.0 if review.verified_purchaser else 1.0)
    raise ValueError(f"unknown weighting mode {mode!r}")


def largest_remainder_quotas(
    counts: Mapping[object, int], cap: int
) -> dict[object, int]:
    """Integer quotas proportional to counts, summing exactly to cap.

    Floors of the exact shares are topped up by largest fractional remainder;
    remainder ties break by larger count, then by key string.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("counts must sum to a positive number")
    quotas: dict[object, int] = {}
    remainders: list[tuple[int, int, str, object]] = []
    for key, count in counts.items():
        quotas[key] = (cap * count) // total
        remainders.append(((cap * count) % total, count, str(key), key))
    leftover = cap - sum(quotas.values())
    remainders.sort(key=lambda item: (-item[0], -item[1], item[2]))
    for _, _, _, key in remainders[:leftover]:
        quotas[key] += 1
    return quotas


def _draw(
    pool: list[str],
    weights: Mapping[str, float],
    k: int,
    rng: SplitMix64,
) -> list[str]:
    """Weighted draws without replacement from pool (mutated), up to k items."""
    chosen: list[str] = []
    for _ in range(min(k, len(pool))):
        total = sum(weights[review_id] for review_id in pool)
        target = rng.next_float() * total
        acc = 0.0
        pick = len(pool) - 1
        for index, review_id in enumerate(pool):
            acc += weights[review_id]
            if target < acc:
                pick = index
                break
        chosen.append(pool.pop(pick))
    return chosen


def select_reviews(
    profile: ProductAspectProfile,
    reviews: Sequence[Review],
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    weighting: Optional[Weighting] = None,
    top_k: int = DEFAULT_TOP_K,
) -> SelectionResult:
    """Pick up to ``cap`` distinct reviews supporting the product's top aspects.

    When the distinct eligible reviews fit under the cap, all are selected.
    Otherwise each (aspect, sentiment) bucket receives a largest-remainder
    quota and is sampled without replacement with the seeded generator; a
    review already selected by another bucket is replaced by the bucket's
    next weighted draw, and an exhausted bucket's residual quota spills to
    the bucket with the most unselected reviews left.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if weighting is None:
        weighting = make_weighting("uniform")

    ranked = top_aspects(profile, k=top_k)
    pair_counts = profile.pair_counts
    pairs: list[tuple[str, Sentiment]] = [
        (aspect, sentiment)
        for aspect in ranked
        for sentiment in SENTIMENT_ORDER
        if pair_counts.get((aspect, sentiment), 0) > 0
    ]
    buckets = {pair: profile.pair_reviews[pair] for pair in pairs}
    selected_aspects = tuple(
        (
            aspect,
            {
                sentiment: pair_counts[(aspect, sentiment)]
                for sentiment in SENTIMENT_ORDER
                if pair_counts.get((aspect, sentiment), 0) > 0
            },
        )
        for aspect in ranked
    )

    eligible: set[str] = set()
    for members in buckets.values():
        eligible.update(members)
    reviews_by_id = {review.review_id: review for review in reviews}
    missing = eligible - set(reviews_by_id)
    if missing:
        raise ValueError(f"reviews missing for ids: {sorted(missing)[:5]}")

    if not pairs:
        return SelectionResult(
            product_id=profile.product_id,
            selected_aspects=selected_aspects,
            buckets={},
            picked={},
            selected_review_ids=(),
            seed=seed,
        )

    if len(eligible) <= cap:
        selected_ids = tuple(sorted(eligible))
        picked: dict[tuple[str, Sentiment], list[str]] = {pair: [] for pair in pairs}
        membership = {pair: set(members) for pair, members in buckets.items()}
        for review_id in selected_ids:
            for pair in pairs:
                if review_id in membership[pair]:
                    picked[pair].append(review_id)
                    break
        return SelectionResult(
            product_id=profile.product_id,
            selected_aspects=selected_aspects,
            buckets=buckets,
            picked={pair: tuple(ids) for pair, ids in picked.items()},
            selected_review_ids=selected_ids,
            seed=seed,
        )

    weights = {
        review_id: max(float(weighting(reviews_by_id[review_id])), MIN_WEIGHT)
        for review_id in eligible
    }
    quotas = largest_remainder_quotas(
        {pair: len(buckets[pair]) for pair in pairs}, cap
    )
    rng = SplitMix64(seed)
    selected: set[str] = set()
    selected_order: list[str] = []
    picked = {pair: [] for pair in pairs}
    pools = {pair: sorted(buckets[pair]) for pair in pairs}

    def _draw_for(pair: tuple[str, Sentiment], quota: int) -> int:
        pool = [rid for rid in pools[pair] if rid not in selected]
        drawn = _draw(pool, weights, quota, rng)
        picked[pair].extend(drawn)
        selected.update(drawn)
        selected_order.extend(drawn)
        return quota - len(drawn)

    def _spill(residual: int) -> None:
        while residual > 0:
            candidates = [
                (pair, sum(1 for rid in pools[pair] if rid not in selected))
                for pair in pairs
            ]
            candidates = [(pair, left) for pair, left in candidates if left > 0]
            if not candidates:
                break
            target = max(candidates, key=lambda item: (item[1], -pairs.index(item[0])))[0]
            residual = _draw_for(target, residual)

    for pair in pairs:
        shortfall = _draw_for(pair, quotas[pair])
        if shortfall:
            _spill(shortfall)

    return SelectionResult(
        product_id=profile.product_id,
        selected_aspects=selected_aspects,
        buckets=buckets,
        picked={pair: tuple(ids) for pair, ids in picked.items()},
        selected_review_ids=tuple(selected_order),
        seed=seed,
    )
