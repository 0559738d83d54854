"""Session orchestration: two learners, two feeds, one click stream.

A session runs the unfiltered and the balanced feed side by side from
the same corpus and the same click stream. Every click teaches both
learners; they diverge only in how their next page is composed. The
unfiltered feed samples straight from its learner's mixture, the
balanced feed first projects its mixture into the user's proportion
bounds.

All operations are value-to-value: they take a state and return a new
state plus the event records describing the step. Nothing is mutated,
so a failed operation simply leaves the caller holding the old state.
The same operations replay a persisted event stream back into an
identical state.
"""

from __future__ import annotations

import random
import threading
import uuid
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from .bandit import (
    BanditState,
    ConstraintConfig,
    base_distribution,
    init_state,
    no_click_step,
    project_to_constraints,
    update,
)
from .config import AppConfig
from .errors import EventLogError, UnknownSessionError
from .events import EVENT_KINDS, EventLog, make_event
from .feed import Article, FeedPage, allocate_slots, compose_page, resolve_click

FEED_NAMES = ("unfiltered", "balanced")

Pools = Sequence[Sequence[Article]]


@dataclass(frozen=True)
class HistoryPoint:
    """Dashboard sample: type-0 share of both feeds plus active bounds.

    Shares and bounds are fractions in [0, 1]. Constraint changes add a
    point at an iteration that already has one, which is what lets the
    dashboard draw the bounds as steps.
    """

    t: int
    pct_liberal_unfiltered: float
    pct_liberal_balanced: float
    lower_liberal: float
    upper_liberal: float


@dataclass(frozen=True)
class SessionState:
    session_id: str
    config: AppConfig
    seed: int
    unfiltered: BanditState
    balanced: BanditState
    constraints: ConstraintConfig
    seen_unfiltered: frozenset[str]
    seen_balanced: frozenset[str]
    unfiltered_page: FeedPage
    balanced_page: FeedPage
    history: tuple[HistoryPoint, ...]
    next_seq: int

    @property
    def t(self) -> int:
        return self.unfiltered.t

    def page(self, feed: str) -> FeedPage:
        if feed == "unfiltered":
            return self.unfiltered_page
        if feed == "balanced":
            return self.balanced_page
        raise ValueError(f"unknown feed {feed!r}")

    def lower_liberal(self) -> float:
        return self.constraints.lower[0]

    def upper_liberal(self) -> float:
        return self.constraints.upper[0]


def _compose(
    learner: BanditState,
    constraints: Optional[ConstraintConfig],
    pools: Pools,
    seen: frozenset[str],
    t: int,
    seed: int,
    page_size: int,
) -> tuple[FeedPage, frozenset[str]]:
    base = base_distribution(learner)
    dist = base if constraints is None else project_to_constraints(base, constraints)
    allocation = allocate_slots(dist, page_size, constraints)
    working = set(seen)
    page = compose_page(allocation, pools, working, t, dist, seed)
    return page, frozenset(working)


def _history_point(state_t: int, unfiltered_page: FeedPage, balanced_page: FeedPage,
                   constraints: ConstraintConfig) -> HistoryPoint:
    return HistoryPoint(
        t=state_t,
        pct_liberal_unfiltered=unfiltered_page.type_share(0),
        pct_liberal_balanced=balanced_page.type_share(0),
        lower_liberal=constraints.lower[0],
        upper_liberal=constraints.upper[0],
    )


def _page_served_event(state: "SessionState", seq: int) -> dict:
    return make_event(
        state.session_id,
        seq,
        "page_served",
        state.t,
        {
            "unfiltered": [a.id for a in state.unfiltered_page.slots],
            "balanced": [a.id for a in state.balanced_page.slots],
        },
    )


def create_session(
    session_id: str,
    config: AppConfig,
    seed: int,
    pools: Pools,
    lower_liberal: Optional[float] = None,
    upper_liberal: Optional[float] = None,
) -> tuple[SessionState, list[dict]]:
    """Start a session: fresh learners, first pages, first history point."""
    config.validate()
    n = config.num_types
    if len(pools) != n:
        raise ValueError("pool count does not match configured types")
    lower = config.lower_liberal if lower_liberal is None else lower_liberal
    upper = config.upper_liberal if upper_liberal is None else upper_liberal
    constraints = ConstraintConfig.from_primary_bounds(lower, upper, n)
    constraints.validate()

    learner = init_state(n, config.eta, config.gamma, config.gamma_decay)
    unfiltered_page, seen_u = _compose(
        learner, None, pools, frozenset(), 0, seed, config.page_size
    )
    balanced_page, seen_b = _compose(
        learner, constraints, pools, frozenset(), 0, seed, config.page_size
    )
    point = _history_point(0, unfiltered_page, balanced_page, constraints)
    state = SessionState(
        session_id=session_id,
        config=config,
        seed=seed,
        unfiltered=learner,
        balanced=learner,
        constraints=constraints,
        seen_unfiltered=seen_u,
        seen_balanced=seen_b,
        unfiltered_page=unfiltered_page,
        balanced_page=balanced_page,
        history=(point,),
        next_seq=2,
    )
    created = make_event(
        session_id,
        0,
        "created",
        0,
        {
            "seed": seed,
            "type_names": list(config.type_names),
            "eta": config.eta,
            "gamma": config.gamma,
            "gamma_decay": config.gamma_decay,
            "page_size": config.page_size,
            "lower_liberal": lower,
            "upper_liberal": upper,
        },
    )
    return state, [created, _page_served_event(state, 1)]


def _advance(
    state: SessionState,
    pools: Pools,
    step: Callable[[BanditState, FeedPage], BanditState],
) -> SessionState:
    """Step both learners, recompose both pages at the new iteration."""
    new_unfiltered = step(state.unfiltered, state.unfiltered_page)
    new_balanced = step(state.balanced, state.balanced_page)
    t = new_unfiltered.t
    page_size = state.config.page_size
    unfiltered_page, seen_u = _compose(
        new_unfiltered, None, pools, state.seen_unfiltered, t, state.seed, page_size
    )
    balanced_page, seen_b = _compose(
        new_balanced, state.constraints, pools, state.seen_balanced, t, state.seed,
        page_size,
    )
    point = _history_point(t, unfiltered_page, balanced_page, state.constraints)
    return replace(
        state,
        unfiltered=new_unfiltered,
        balanced=new_balanced,
        seen_unfiltered=seen_u,
        seen_balanced=seen_b,
        unfiltered_page=unfiltered_page,
        balanced_page=balanced_page,
        history=state.history + (point,),
    )


def apply_click(
    state: SessionState, pools: Pools, feed: str, article_id: str
) -> tuple[SessionState, list[dict]]:
    """One click on either feed advances the whole session one iteration.

    Both learners receive the signal, each weighted by the display
    probability on its *own* page. A learner whose page gave the
    clicked type no probability at all (possible only with exploration
    disabled) advances without feedback rather than poisoning the
    estimate.
    """
    if feed not in FEED_NAMES:
        raise ValueError(f"unknown feed {feed!r}")
    signal = resolve_click(state.page(feed), article_id)

    def step(learner: BanditState, page: FeedPage) -> BanditState:
        if page.sampling_dist.probs[signal.clicked_type.index] > 0.0:
            return update(learner, signal, page.sampling_dist)
        return no_click_step(learner)

    clicked_at = state.t
    new_state = _advance(state, pools, step)
    events = [
        make_event(
            state.session_id,
            state.next_seq,
            "click",
            clicked_at,
            {
                "feed": feed,
                "article_id": article_id,
                "clicked_type": signal.clicked_type.name,
            },
        ),
        _page_served_event(new_state, state.next_seq + 1),
    ]
    return replace(new_state, next_seq=state.next_seq + 2), events


def advance_no_click(
    state: SessionState, pools: Pools
) -> tuple[SessionState, list[dict]]:
    """Advance one iteration without feedback; weights stay put."""
    advanced_from = state.t
    new_state = _advance(state, pools, lambda learner, _page: no_click_step(learner))
    events = [
        make_event(
            state.session_id, state.next_seq, "no_click_advance", advanced_from, {}
        ),
        _page_served_event(new_state, state.next_seq + 1),
    ]
    return replace(new_state, next_seq=state.next_seq + 2), events


def apply_constraint_change(
    state: SessionState,
    pools: Pools,
    new_lower_liberal: float,
    new_upper_liberal: float,
) -> tuple[SessionState, list[dict]]:
    """Apply new bounds immediately: only the balanced page re-composes.

    The iteration counter does not move and neither learner changes;
    the next page of the balanced feed simply obeys the new bounds.
    The extra history point at the same iteration records the jump.
    """
    constraints = ConstraintConfig.from_primary_bounds(
        new_lower_liberal, new_upper_liberal, state.config.num_types
    )
    constraints.validate()
    balanced_page, seen_b = _compose(
        state.balanced,
        constraints,
        pools,
        state.seen_balanced,
        state.t,
        state.seed,
        state.config.page_size,
    )
    point = _history_point(state.t, state.unfiltered_page, balanced_page, constraints)
    new_state = replace(
        state,
        constraints=constraints,
        seen_balanced=seen_b,
        balanced_page=balanced_page,
        history=state.history + (point,),
        next_seq=state.next_seq + 2,
    )
    events = [
        make_event(
            state.session_id,
            state.next_seq,
            "constraint_change",
            state.t,
            {
                "lower_liberal": new_lower_liberal,
                "upper_liberal": new_upper_liberal,
            },
        ),
        _page_served_event(new_state, state.next_seq + 1),
    ]
    return new_state, events


def replay(records: Sequence[dict], pools: Pools) -> SessionState:
    """Rebuild a session by re-running its event stream.

    The stream must start with its creation record and carry a
    contiguous ``seq``. Recorded ``page_served`` events are checked
    against the pages the replay actually composes, so any drift
    between log and code fails loudly instead of silently diverging.
    """
    if not records:
        raise UnknownSessionError("unknown session")

    state: Optional[SessionState] = None
    for position, record in enumerate(records):
        try:
            seq = record["seq"]
            kind = record["kind"]
            payload = record["payload"]
        except (TypeError, KeyError) as exc:
            raise EventLogError(f"record {position} is missing fields: {exc}") from exc
        if seq != position:
            raise EventLogError(f"expected seq {position}, found {seq}")
        if kind not in EVENT_KINDS:
            raise EventLogError(f"unknown event kind {kind!r} at seq {seq}")

        if kind == "created":
            if state is not None:
                raise EventLogError(f"second creation record at seq {seq}")
            config = AppConfig(
                type_names=tuple(payload["type_names"]),
                eta=payload["eta"],
                gamma=payload["gamma"],
                gamma_decay=payload["gamma_decay"],
                page_size=payload["page_size"],
            )
            state, _ = create_session(
                record["session_id"],
                config,
                payload["seed"],
                pools,
                payload["lower_liberal"],
                payload["upper_liberal"],
            )
            continue
        if state is None:
            raise EventLogError("seq 0: stream does not start with a creation record")

        if kind == "click":
            state, _ = apply_click(
                state, pools, payload["feed"], payload["article_id"]
            )
        elif kind == "constraint_change":
            state, _ = apply_constraint_change(
                state, pools, payload["lower_liberal"], payload["upper_liberal"]
            )
        elif kind == "no_click_advance":
            state, _ = advance_no_click(state, pools)
        else:  # page_served: verify, do not apply
            served = {
                "unfiltered": [a.id for a in state.unfiltered_page.slots],
                "balanced": [a.id for a in state.balanced_page.slots],
            }
            if served != payload:
                raise EventLogError(
                    f"replayed pages diverge from the log at seq {seq}"
                )

    assert state is not None
    return replace(state, next_seq=len(records))


class SessionStore:
    """Thread-safe registry of live sessions on top of an event log.

    One lock per session serializes its mutations; the event batch is
    appended before the in-memory state is swapped, so a failing sink
    rejects the mutation as a whole.
    """

    def __init__(
        self,
        pools: Pools,
        config: AppConfig,
        log: EventLog,
        id_factory: Optional[Callable[[], str]] = None,
    ):
        config.validate()
        self.pools = pools
        self.config = config
        self.log = log
        self._id_factory = id_factory or (lambda: uuid.uuid4().hex[:12])
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def create(
        self,
        seed: Optional[int] = None,
        lower_liberal: Optional[float] = None,
        upper_liberal: Optional[float] = None,
    ) -> SessionState:
        if seed is None:
            seed = random.getrandbits(31)
        with self._registry_lock:
            session_id = self._id_factory()
            if session_id in self._sessions:
                raise EventLogError(f"session id collision: {session_id!r}")
            state, events = create_session(
                session_id, self.config, seed, self.pools, lower_liberal, upper_liberal
            )
            self.log.append(session_id, events)
            self._sessions[session_id] = state
            self._locks[session_id] = threading.Lock()
            return state

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                raise UnknownSessionError(f"unknown session {session_id!r}")
            return self._locks[session_id]

    def get(self, session_id: str) -> SessionState:
        with self._registry_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def _mutate(self, session_id: str, fn) -> SessionState:
        lock = self._lock_for(session_id)
        with lock:
            state = self.get(session_id)
            new_state, events = fn(state)
            self.log.append(session_id, events)
            with self._registry_lock:
                self._sessions[session_id] = new_state
            return new_state

    def click(self, session_id: str, feed: str, article_id: str) -> SessionState:
        return self._mutate(
            session_id, lambda s: apply_click(s, self.pools, feed, article_id)
        )

    def change_constraints(
        self, session_id: str, lower_liberal: float, upper_liberal: float
    ) -> SessionState:
        return self._mutate(
            session_id,
            lambda s: apply_constraint_change(
                s, self.pools, lower_liberal, upper_liberal
            ),
        )

    def advance(self, session_id: str) -> SessionState:
        return self._mutate(session_id, lambda s: advance_no_click(s, self.pools))

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def restore_from_log(self) -> list[str]:
        """Replay every session the log knows about. Returns restored ids."""
        restored = []
        for session_id in self.log.session_ids():
            records = self.log.read(session_id)
            if not records:
                continue
            state = replay(records, self.pools)
            with self._registry_lock:
                self._sessions[session_id] = state
                self._locks[session_id] = threading.Lock()
            restored.append(session_id)
        return restored
