"""Runtime defaults and optional JSON config overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .bandit import (
    DEFAULT_ETA,
    DEFAULT_GAMMA,
    DEFAULT_GAMMA_DECAY,
    TypeLabel,
    make_labels,
)
from .errors import ConfigError
from .feed import DEFAULT_PAGE_SIZE

DEFAULT_LOWER = 0.2
DEFAULT_UPPER = 0.8


@dataclass(frozen=True)
class AppConfig:
    """Everything a session needs beyond the article pools.

    ``lower_liberal``/``upper_liberal`` bound the share of the first
    type; the remaining types share the complement.
    """

    type_names: tuple[str, ...] = ("liberal", "conservative")
    eta: float = DEFAULT_ETA
    gamma: float = DEFAULT_GAMMA
    gamma_decay: float = DEFAULT_GAMMA_DECAY
    page_size: int = DEFAULT_PAGE_SIZE
    lower_liberal: float = DEFAULT_LOWER
    upper_liberal: float = DEFAULT_UPPER

    def labels(self) -> tuple[TypeLabel, ...]:
        return make_labels(self.type_names)

    @property
    def num_types(self) -> int:
        return len(self.type_names)

    def validate(self) -> None:
        if self.num_types < 2:
            raise ConfigError("need at least two types")
        if not self.eta > 0:
            raise ConfigError("eta must be positive")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma must be in [0, 1)")
        if not 0.0 < self.gamma_decay <= 1.0:
            raise ConfigError("gamma decay must be in (0, 1]")
        if self.page_size < 1:
            raise ConfigError("page size must be at least 1")
        if not 0.0 <= self.lower_liberal <= self.upper_liberal <= 1.0:
            raise ConfigError("require 0 <= lower <= upper <= 1")


def load_config(path: Optional[str | Path] = None) -> AppConfig:
    """Defaults, optionally overridden by keys in a JSON file."""
    config = AppConfig()
    if path is None:
        return config
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")

    known = {f.name for f in fields(AppConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "type_names" in raw:
        names = raw["type_names"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ConfigError("type_names must be a list of strings")
        raw = dict(raw, type_names=tuple(names))
    try:
        config = replace(config, **raw)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    config.validate()
    return config
