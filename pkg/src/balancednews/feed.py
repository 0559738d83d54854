"""Page composition: turn a sampling distribution into concrete articles.

Slots are allocated to types by largest-remainder rounding, optionally
repaired into integer bounds implied by the proportion constraints, and
then filled with the highest-rated unseen articles of each type. The
final slot order is shuffled deterministically from the session seed
and the iteration number, so identical inputs compose identical pages.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional, Sequence

from .bandit import ConstraintConfig, Distribution, RewardSignal, TypeLabel
from .errors import InfeasibleConstraintsError, PoolExhaustedError, UnknownArticleError

DEFAULT_PAGE_SIZE = 10

# Guard for integer bounds derived from products like 0.2 * 10, which
# float arithmetic may land a hair above or below the exact value.
_BOUND_EPS = 1e-9


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    url: str
    source_domain: str
    type: TypeLabel
    rating: float
    published_at: datetime


@dataclass(frozen=True)
class SlotAllocation:
    """Integer slot counts per type for one page."""

    counts: tuple[int, ...]
    page_size: int

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise ValueError("page size must be at least 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("slot counts must be non-negative")
        if sum(self.counts) != self.page_size:
            raise ValueError("slot counts must sum to the page size")


@dataclass(frozen=True)
class FeedPage:
    """One served page: ordered slots plus the distribution behind them."""

    iteration: int
    slots: tuple[Article, ...]
    allocation: SlotAllocation
    sampling_dist: Distribution

    def find(self, article_id: str) -> Optional[Article]:
        for article in self.slots:
            if article.id == article_id:
                return article
        return None

    def type_count(self, type_index: int) -> int:
        return self.allocation.counts[type_index]

    def type_share(self, type_index: int) -> float:
        return self.allocation.counts[type_index] / self.allocation.page_size


def allocate_slots(
    dist: Distribution,
    page_size: int = DEFAULT_PAGE_SIZE,
    constraints: Optional[ConstraintConfig] = None,
) -> SlotAllocation:
    """Round ``dist * page_size`` to integers, honoring constraints.

    Largest-remainder rounding: every type gets the floor of its exact
    share, then the leftover slots go to the largest fractional
    remainders, lowest type index first on ties. When proportion
    constraints are given, the result is repaired into the integer
    box [ceil(lower*K), floor(upper*K)] by moving single slots from
    the most over-cap type to the most under-floor type.
    """
    if page_size < 1:
        raise ValueError("page size must be at least 1")
    n = len(dist)
    exact = [p * page_size for p in dist.probs]
    counts = [math.floor(x) for x in exact]
    leftover = page_size - sum(counts)
    remainders = sorted(range(n), key=lambda g: (-(exact[g] - counts[g]), g))
    for g in remainders[:leftover]:
        counts[g] += 1

    if constraints is not None:
        constraints.validate()
        if len(constraints.lower) != n:
            raise ValueError("constraint length does not match distribution")
        floors = [math.ceil(lo * page_size - _BOUND_EPS) for lo in constraints.lower]
        caps = [math.floor(up * page_size + _BOUND_EPS) for up in constraints.upper]
        per_type_empty = any(f > c for f, c in zip(floors, caps))
        if per_type_empty or sum(floors) > page_size or sum(caps) < page_size:
            raise InfeasibleConstraintsError(
                f"constraints unsatisfiable at page size {page_size}"
            )
        _repair_counts(counts, floors, caps)

    return SlotAllocation(counts=tuple(counts), page_size=page_size)


def _repair_counts(counts: list[int], floors: list[int], caps: list[int]) -> None:
    """Move slots one at a time until every count sits inside its box."""
    n = len(counts)
    while True:
        over = [g for g in range(n) if counts[g] > caps[g]]
        under = [g for g in range(n) if counts[g] < floors[g]]
        if not over and not under:
            return
        if over:
            src = max(over, key=lambda g: (counts[g] - caps[g], -g))
        else:
            # No cap violations: donate from the type with the most
            # slack above its floor.
            src = max(range(n), key=lambda g: (counts[g] - floors[g], -g))
        if under:
            dst = max(under, key=lambda g: (floors[g] - counts[g], -g))
        else:
            dst = max(
                (g for g in range(n) if counts[g] < caps[g]),
                key=lambda g: (caps[g] - counts[g], -g),
            )
        counts[src] -= 1
        counts[dst] += 1


def compose_page(
    allocation: SlotAllocation,
    pools: Sequence[Sequence[Article]],
    seen: set[str],
    iteration: int,
    sampling_dist: Distribution,
    seed: int,
) -> FeedPage:
    """Fill the allocated slots from per-type pools and shuffle them.

    ``pools`` is indexed by type and must already be sorted in serving
    order (rating first). Articles whose ids are in ``seen`` are
    skipped; on success the chosen ids are added to ``seen``. When any
    type runs short the page fails as a whole and ``seen`` is left
    untouched.

    The shuffle is keyed by ``"{seed}:{iteration}"`` only, so two
    feeds of the same session serving the same slot multiset at the
    same iteration lay the articles out identically.
    """
    if len(pools) != len(allocation.counts):
        raise ValueError("pool count does not match allocation")
    chosen: list[Article] = []
    for g, need in enumerate(allocation.counts):
        if need == 0:
            continue
        picked = []
        for article in pools[g]:
            if article.id in seen:
                continue
            picked.append(article)
            if len(picked) == need:
                break
        if len(picked) < need:
            available = len(picked)
            name = pools[g][0].type.name if pools[g] else f"type {g}"
            raise PoolExhaustedError(name, need, available)
        chosen.extend(picked)

    rng = random.Random(f"{seed}:{iteration}")
    rng.shuffle(chosen)
    seen.update(article.id for article in chosen)
    return FeedPage(
        iteration=iteration,
        slots=tuple(chosen),
        allocation=allocation,
        sampling_dist=sampling_dist,
    )


def resolve_click(page: FeedPage, article_id: str) -> RewardSignal:
    """Map a clicked article id to a unit reward for its type."""
    article = page.find(article_id)
    if article is None:
        raise UnknownArticleError(
            f"click on unknown article {article_id!r} at iteration {page.iteration}"
        )
    return RewardSignal(clicked_type=article.type, value=1.0)


def pool_sizes(pools: Sequence[Sequence[Article]]) -> tuple[int, ...]:
    return tuple(len(pool) for pool in pools)


def remaining_by_type(
    pools: Sequence[Sequence[Article]], seen: Iterable[str]
) -> tuple[int, ...]:
    seen_set = set(seen)
    return tuple(
        sum(1 for article in pool if article.id not in seen_set) for pool in pools
    )
