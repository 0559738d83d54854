"""Exception taxonomy shared across the package."""

from __future__ import annotations


class BalancedNewsError(Exception):
    """Base class for all domain errors."""


class ConfigError(BalancedNewsError):
    """Invalid configuration, bias mapping, or unconfigured component."""


class InfeasibleConstraintsError(BalancedNewsError):
    """The requested proportion bounds admit no valid distribution or page."""


class PoolExhaustedError(BalancedNewsError):
    """A type pool has fewer unseen articles than a page needs."""

    def __init__(self, type_name: str, needed: int, available: int):
        self.type_name = type_name
        self.needed = needed
        self.available = available
        super().__init__(
            f"pool exhausted for type {type_name!r}: need {needed}, have {available}"
        )


class UnknownArticleError(BalancedNewsError):
    """A click referenced an article that is not on the current page."""


class UnknownSessionError(BalancedNewsError):
    """A session id that the store or event log does not know."""


class EventLogError(BalancedNewsError):
    """Corrupt, out-of-order, or otherwise unusable event log data."""


class SourceError(BalancedNewsError):
    """A live article source failed at the transport level."""
