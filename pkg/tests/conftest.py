"""Shared fixtures and independent oracles used across the suite."""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from balancednews.bandit import ConstraintConfig, Distribution, make_labels
from balancednews.corpusgen import make_articles
from balancednews.ingest import build_pools


@pytest.fixture
def labels():
    return make_labels(["liberal", "conservative"])


@pytest.fixture
def pools(labels):
    return build_pools(make_articles(400, labels), 2)


@pytest.fixture
def big_pools(labels):
    return build_pools(make_articles(1200, labels), 2)


def projection_grid_oracle_n2(
    dist: Distribution, cfg: ConstraintConfig, step: float = 1e-4
) -> tuple[float, float]:
    """Brute-force reference for the two-type projection.

    Scans p0 over a regular grid of the feasible interval and returns
    the feasible (p0, 1-p0) minimizing total-variation distance to the
    input. Independent of the production algorithm: nothing shared but
    the problem statement.
    """
    lo0, lo1 = cfg.lower
    up0, up1 = cfg.upper
    start = max(lo0, 1.0 - up1)
    end = min(up0, 1.0 - lo1)
    assert start <= end + 1e-12, "infeasible fixture"
    d0, d1 = dist.probs
    best_p0 = start
    best_tv = float("inf")
    steps = int(round((end - start) / step))
    for i in range(steps + 1):
        p0 = min(start + i * step, end)
        tv = 0.5 * (abs(p0 - d0) + abs((1.0 - p0) - d1))
        if tv < best_tv - 1e-15:
            best_tv = tv
            best_p0 = p0
    return best_p0, 1.0 - best_p0


@functools.lru_cache(maxsize=None)
def _count_vectors(page_size: int, n: int):
    candidates = [
        counts
        for counts in itertools.product(range(page_size + 1), repeat=n)
        if sum(counts) == page_size
    ]
    return candidates, np.array(candidates, dtype=float)


def rounding_oracle(dist: Distribution, page_size: int) -> tuple[int, ...]:
    """Exhaustive reference for largest-remainder rounding.

    Enumerates every count vector summing to the page size, minimizes
    the L1 distance to the exact shares, and breaks ties by taking the
    lexicographically largest vector, which is what handing leftover
    slots to the lowest-index type among equal remainders produces.
    """
    n = len(dist)
    exact_floats = [p * page_size for p in dist.probs]
    candidates, matrix = _count_vectors(page_size, n)
    rough = np.abs(matrix - np.array(exact_floats)).sum(axis=1)
    # floats near-tie all over the grid; settle the shortlist with exact
    # rational arithmetic so 1-ulp remainder gaps stay distinct
    shortlist = [c for c, d in zip(candidates, rough) if d <= rough.min() + 1e-6]
    exact = [Fraction(e) for e in exact_floats]
    distances = [
        sum(abs(Fraction(cg) - eg) for cg, eg in zip(c, exact)) for c in shortlist
    ]
    best = min(distances)
    return max(c for c, d in zip(shortlist, distances) if d == best)


def estimator_expectation(probs: tuple[float, ...], rewards: tuple[float, ...]):
    """E[r-hat] under the sampling distribution, by explicit summation.

    Clicking type g (probability probs[g]) yields the estimate vector
    with rewards[g]/probs[g] at g and zero elsewhere; the expectation
    over g of coordinate h is probs[h] * rewards[h]/probs[h].
    """
    n = len(probs)
    expectation = [0.0] * n
    for g in range(n):
        estimate = [0.0] * n
        estimate[g] = rewards[g] / probs[g]
        for h in range(n):
            expectation[h] += probs[g] * estimate[h]
    return expectation


def feasible_constraints(rng, n: int) -> ConstraintConfig:
    """Random feasible box constraints for n types."""
    while True:
        lower = [rng.uniform(0.0, 1.0 / n) for _ in range(n)]
        upper = [min(1.0, lo + rng.uniform(0.0, 1.0)) for lo in lower]
        if sum(lower) <= 1.0 <= sum(upper):
            return ConstraintConfig(lower=tuple(lower), upper=tuple(upper))


def random_distribution(rng, n: int) -> Distribution:
    raw = [rng.random() for _ in range(n)]
    # occasionally zero a coordinate to exercise the deficit path
    if rng.random() < 0.15:
        raw[rng.randrange(n)] = 0.0
    total = sum(raw)
    if total == 0:
        return Distribution(probs=(1.0 / n,) * n)
    probs = [x / total for x in raw]
    probs[-1] = 1.0 - sum(probs[:-1])
    return Distribution(probs=tuple(probs))


def page_feasible(cfg: ConstraintConfig, page_size: int) -> bool:
    floors = [math.ceil(lo * page_size - 1e-9) for lo in cfg.lower]
    caps = [math.floor(up * page_size + 1e-9) for up in cfg.upper]
    if any(f > c for f, c in zip(floors, caps)):
        return False
    return sum(floors) <= page_size <= sum(caps)
