"""Two-feed news personalization with user-adjustable proportion bounds.

The package serves an unfiltered feed, which follows clicks wherever
they lead, next to a balanced feed, which learns from the same clicks
but keeps each content type's share of the page inside bounds the user
controls.
"""

from .bandit import (
    BanditState,
    ConstraintConfig,
    Distribution,
    RewardSignal,
    TypeLabel,
    base_distribution,
    init_state,
    make_labels,
    no_click_step,
    project_to_constraints,
    update,
)
from .config import AppConfig, load_config
from .errors import (
    BalancedNewsError,
    ConfigError,
    EventLogError,
    InfeasibleConstraintsError,
    PoolExhaustedError,
    SourceError,
    UnknownArticleError,
    UnknownSessionError,
)
from .feed import (
    Article,
    FeedPage,
    SlotAllocation,
    allocate_slots,
    compose_page,
    resolve_click,
)
from .ingest import build_pools, classify, ingest_corpus, load_bias_map, load_corpus
from .session import (
    HistoryPoint,
    SessionState,
    SessionStore,
    advance_no_click,
    apply_click,
    apply_constraint_change,
    create_session,
    replay,
)

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "Article",
    "BalancedNewsError",
    "BanditState",
    "ConfigError",
    "ConstraintConfig",
    "Distribution",
    "EventLogError",
    "FeedPage",
    "HistoryPoint",
    "InfeasibleConstraintsError",
    "PoolExhaustedError",
    "RewardSignal",
    "SessionState",
    "SessionStore",
    "SlotAllocation",
    "SourceError",
    "TypeLabel",
    "UnknownArticleError",
    "UnknownSessionError",
    "advance_no_click",
    "allocate_slots",
    "apply_click",
    "apply_constraint_change",
    "base_distribution",
    "build_pools",
    "classify",
    "compose_page",
    "create_session",
    "ingest_corpus",
    "init_state",
    "load_bias_map",
    "load_config",
    "load_corpus",
    "make_labels",
    "no_click_step",
    "project_to_constraints",
    "replay",
    "resolve_click",
    "update",
    "__version__",
]
