"""Exponential-weights learner over content types.

Each feed keeps one learner. The learner maintains a positive weight per
content type; a page is sampled from a mixture of the normalized weights
and a uniform exploration floor. Clicks feed back through an
importance-weighted estimate so that types shown rarely but clicked
anyway gain weight quickly.

The balanced feed additionally pushes the mixture through
:func:`project_to_constraints`, which finds the closest scaled
distribution inside per-type proportion bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import InfeasibleConstraintsError

DEFAULT_ETA = 0.5
DEFAULT_GAMMA = 0.1
DEFAULT_GAMMA_DECAY = 0.8

# Tolerance for "sums to one" checks on float vectors.
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TypeLabel:
    """A content type: a stable index plus a human-readable name."""

    index: int
    name: str


def make_labels(names: Sequence[str]) -> tuple[TypeLabel, ...]:
    """Build the ordered label tuple for a list of type names.

    Names must be unique and non-empty; indices follow list order.
    """
    if len(names) < 1:
        raise ValueError("at least one type name required")
    seen: set[str] = set()
    labels = []
    for i, name in enumerate(names):
        if not isinstance(name, str) or not name.strip():
            raise ValueError(f"type name at position {i} is empty")
        if name in seen:
            raise ValueError(f"duplicate type name {name!r}")
        seen.add(name)
        labels.append(TypeLabel(index=i, name=name))
    return tuple(labels)


@dataclass(frozen=True)
class Distribution:
    """A probability vector over types. Entries sum to one."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) < 1:
            raise ValueError("distribution needs at least one entry")
        for p in self.probs:
            if not math.isfinite(p) or p < -SUM_TOLERANCE or p > 1 + SUM_TOLERANCE:
                raise ValueError(f"probability out of range: {p!r}")
        total = sum(self.probs)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class ConstraintConfig:
    """Per-type proportion bounds: lower[g] <= share of type g <= upper[g]."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper bounds differ in length")
        for g, (lo, up) in enumerate(zip(self.lower, self.upper)):
            if not (math.isfinite(lo) and math.isfinite(up)):
                raise ValueError(f"non-finite bound for type {g}")
            if lo < 0 or up > 1:
                raise ValueError(f"bounds for type {g} outside [0, 1]")

    def validate(self) -> None:
        """Raise if no distribution satisfies the bounds."""
        for lo, up in zip(self.lower, self.upper):
            if lo > up:
                raise InfeasibleConstraintsError("empty constraint polytope")
        if sum(self.lower) > 1 + SUM_TOLERANCE:
            raise InfeasibleConstraintsError("empty constraint polytope")
        if sum(self.upper) < 1 - SUM_TOLERANCE:
            raise InfeasibleConstraintsError("empty constraint polytope")

    @staticmethod
    def unconstrained(num_types: int) -> "ConstraintConfig":
        return ConstraintConfig(lower=(0.0,) * num_types, upper=(1.0,) * num_types)

    @staticmethod
    def from_primary_bounds(
        lower_primary: float, upper_primary: float, num_types: int = 2
    ) -> "ConstraintConfig":
        """Bounds for type 0, with the complement shared by the rest.

        For the two-type case this is the slider contract: capping type 0
        at ``upper_primary`` is the same as flooring type 1 at
        ``1 - upper_primary``, and vice versa.
        """
        if num_types < 2:
            raise ValueError("need at least two types")
        if not (0.0 <= lower_primary <= upper_primary <= 1.0):
            raise InfeasibleConstraintsError(
                "require 0 <= lower <= upper <= 1 for the primary type"
            )
        rest_lower = (1.0 - upper_primary) / (num_types - 1)
        rest_upper = 1.0 - lower_primary
        lower = (lower_primary,) + (rest_lower,) * (num_types - 1)
        upper = (upper_primary,) + (min(rest_upper, 1.0),) * (num_types - 1)
        return ConstraintConfig(lower=lower, upper=upper)


@dataclass(frozen=True)
class RewardSignal:
    """Feedback from one click: which type was hit and its reward value."""

    clicked_type: TypeLabel
    value: float = 1.0


@dataclass(frozen=True)
class BanditState:
    """Immutable learner state.

    weights     normalized positive weights, one per type
    eta         learning rate for the multiplicative update
    gamma       current uniform exploration share of the mixture
    gamma_decay factor applied to gamma on each rewarded update; 1.0
                keeps exploration fixed forever
    t           number of completed iterations
    """

    weights: tuple[float, ...]
    eta: float
    gamma: float
    gamma_decay: float
    t: int

    def __post_init__(self) -> None:
        for w in self.weights:
            if not math.isfinite(w) or w <= 0:
                raise ValueError(f"weight out of range: {w!r}")
        if abs(sum(self.weights) - 1.0) > 1e-6:
            raise ValueError("weights must stay normalized")

    @property
    def num_types(self) -> int:
        return len(self.weights)


def init_state(
    num_types: int,
    eta: float = DEFAULT_ETA,
    gamma: float = DEFAULT_GAMMA,
    gamma_decay: float = DEFAULT_GAMMA_DECAY,
) -> BanditState:
    """Fresh learner: uniform weights, iteration counter at zero."""
    if num_types < 2:
        raise ValueError("need at least two types")
    if not (eta > 0 and math.isfinite(eta)):
        raise ValueError("eta must be positive")
    if not (0.0 <= gamma < 1.0):
        raise ValueError("gamma must be in [0, 1)")
    if not (0.0 < gamma_decay <= 1.0):
        raise ValueError("gamma decay must be in (0, 1]")
    return BanditState(
        weights=(1.0 / num_types,) * num_types,
        eta=eta,
        gamma=gamma,
        gamma_decay=gamma_decay,
        t=0,
    )


def base_distribution(state: BanditState) -> Distribution:
    """Mixture of normalized weights and the uniform exploration floor.

    prob[g] = (1 - gamma) * w[g] / sum(w) + gamma / N
    """
    n = state.num_types
    total = sum(state.weights)
    floor = state.gamma / n
    probs = tuple((1.0 - state.gamma) * w / total + floor for w in state.weights)
    return Distribution(probs=probs)


def update(
    state: BanditState, signal: RewardSignal, sampling_dist: Distribution
) -> BanditState:
    """Apply one click.

    The reward is importance-weighted by the probability the clicked
    type actually had on the page that was shown (``sampling_dist``),
    so each feed must pass the distribution *it* sampled from. A zero
    probability for the clicked type means the caller's page
    accounting is broken, and is rejected loudly.

    Exploration decays by ``gamma_decay`` only on rewarded updates:
    a stream of clicks is exactly the regime where the learner should
    trust its weights more and explore less. Zero-value signals leave
    both weights and gamma untouched.
    """
    n = state.num_types
    if len(sampling_dist) != n:
        raise ValueError("sampling distribution length does not match state")
    idx = signal.clicked_type.index
    if idx < 0 or idx >= n:
        raise ValueError(f"clicked type index {idx} out of range")
    if not math.isfinite(signal.value) or signal.value < 0:
        raise ValueError("reward value must be finite and non-negative")

    p = sampling_dist.probs[idx]
    if p <= 0.0:
        raise ValueError("clicked type had zero display probability")

    estimated = signal.value / p
    x = state.eta * estimated / n
    if x < 709.0:
        scaled = tuple(
            w * math.exp(x) if g == idx else w for g, w in enumerate(state.weights)
        )
    else:
        # a huge estimate (tiny click probability late in a run) would
        # overflow e^x; rescaling all raw weights by a positive constant
        # leaves the induced distribution unchanged, so shift exponents
        # down by the largest one and floor dead types at the smallest
        # positive float to keep the state valid
        exponents = tuple(
            math.log(w) + (x if g == idx else 0.0)
            for g, w in enumerate(state.weights)
        )
        shift = max(exponents)
        scaled = tuple(max(math.exp(e - shift), 5e-324) for e in exponents)
    total = sum(scaled)
    new_weights = tuple(w / total for w in scaled)
    new_gamma = state.gamma * state.gamma_decay if signal.value > 0 else state.gamma
    return replace(state, weights=new_weights, gamma=new_gamma, t=state.t + 1)


def no_click_step(state: BanditState) -> BanditState:
    """Advance the iteration counter without feedback.

    No reward means no information under click-only feedback, so the
    weights and the exploration share stay exactly as they are.
    """
    return replace(state, t=state.t + 1)


def project_to_constraints(
    dist: Distribution, constraints: ConstraintConfig
) -> Distribution:
    """Pull a distribution inside per-type proportion bounds.

    Finds the vector p with lower <= p <= upper and sum(p) = 1 that
    preserves the input's proportions wherever the box allows: there
    is a single scale s >= 0 with

        p[g] = clip(s * dist[g], lower[g], upper[g])

    The sum of the right-hand side is a nondecreasing piecewise-linear
    function of s, so the correct s is found by scanning the
    breakpoints where a component hits one of its bounds. Types the
    input gave zero probability can only enter through their lower
    bounds; if mass is still missing after every positive-probability
    type is capped, the remainder is spread evenly across the
    zero-probability types up to their caps.

    Feasible inputs are returned unchanged, bit for bit.
    """
    constraints.validate()
    n = len(dist)
    if len(constraints.lower) != n:
        raise ValueError("constraint length does not match distribution")

    d = dist.probs
    lo = constraints.lower
    up = constraints.upper

    if all(lo[g] <= d[g] <= up[g] for g in range(n)):
        return dist

    def filled(scale: float) -> float:
        # explicit zero handling: scale may be inf when a bound ratio
        # overflows, and inf * 0.0 would poison the sum with a nan
        return sum(
            lo[g] if d[g] == 0.0 else min(max(scale * d[g], lo[g]), up[g])
            for g in range(n)
        )

    low_ratio = [lo[g] / d[g] if d[g] > 0 else math.inf for g in range(n)]
    high_ratio = [up[g] / d[g] if d[g] > 0 else math.inf for g in range(n)]
    breakpoints = sorted(
        {r for g in range(n) if d[g] > 0 for r in (low_ratio[g], high_ratio[g])}
    )

    probs: list[float] | None = None
    previous = 0.0
    for bp in breakpoints:
        if filled(bp) >= 1.0 - 1e-15:
            probs = _solve_segment(d, lo, up, low_ratio, high_ratio, previous, bp)
            break
        previous = bp
    if probs is None:
        # Every positive-probability type is pinned at its cap and mass
        # is still missing; only zero-probability types can absorb it.
        probs = [up[g] if d[g] > 0 else lo[g] for g in range(n)]
        _spread_deficit(probs, up, [g for g in range(n) if d[g] == 0])

    return Distribution(probs=tuple(probs))


def _solve_segment(
    d: Sequence[float],
    lo: Sequence[float],
    up: Sequence[float],
    low_ratio: Sequence[float],
    high_ratio: Sequence[float],
    s_low: float,
    s_high: float,
) -> list[float]:
    """Solve filled(s) = 1 for s in (s_low, s_high] and return the vector.

    Every bound ratio is itself a breakpoint, so no ratio falls in the
    segment's interior: a component is below its floor throughout the
    segment exactly when its floor ratio is >= the segment's right
    edge, and above its cap exactly when its cap ratio is <= the left
    edge. The remaining free components scale linearly, so the
    residual mass fixes them in closed form.
    """
    n = len(d)
    probs = [0.0] * n
    residual = 1.0
    free = []
    for g in range(n):
        if d[g] == 0.0 or low_ratio[g] >= s_high:
            probs[g] = lo[g]
            residual -= lo[g]
        elif high_ratio[g] <= s_low:
            probs[g] = up[g]
            residual -= up[g]
        else:
            free.append(g)

    free_mass = sum(d[g] for g in free)
    if free_mass <= 0.0:
        # Flat segment: the pinned masses alone already account for
        # everything; distribute any float dust over whatever room is left.
        _spread_deficit(probs, up, [g for g in range(n) if probs[g] < up[g]])
        return probs

    for g in free:
        # Mathematically inside [lo, up]; the clip only absorbs float
        # dust so re-projection is an exact no-op.
        probs[g] = min(max(d[g] * residual / free_mass, lo[g]), up[g])
    return probs


def _spread_deficit(
    probs: list[float], up: Sequence[float], candidates: list[int]
) -> None:
    """Raise the listed entries evenly until the vector sums to one."""
    remaining = 1.0 - sum(probs)
    active = [g for g in candidates if probs[g] < up[g]]
    while remaining > 1e-15 and active:
        share = remaining / len(active)
        next_active = []
        for g in active:
            room = up[g] - probs[g]
            take = min(share, room)
            probs[g] += take
            remaining -= take
            if probs[g] < up[g] - 1e-15:
                next_active.append(g)
        active = next_active
