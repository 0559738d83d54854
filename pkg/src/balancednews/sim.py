"""Scripted-user simulation over the session layer.

A scenario bundles a user model, a corpus source, starting bounds, and
an iteration count. The simulated user looks at one feed per
iteration, clicks an article of their preferred type with some
probability, and otherwise either clicks anything or skips the page.
Every run is a pure function of (scenario, seed).
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from random import Random
from typing import Optional, Sequence

from .bandit import TypeLabel
from .config import AppConfig
from .corpusgen import make_articles
from .errors import ConfigError
from .events import EventLog
from .ingest import build_pools, ingest_corpus
from .session import (
    HistoryPoint,
    Pools,
    SessionState,
    advance_no_click,
    apply_click,
    create_session,
)

FORMATS = ("csv", "jsonl")

CSV_FIELDS = (
    "t",
    "pct_lib_unfiltered",
    "pct_lib_balanced",
    "lower",
    "upper",
    "clicked_type",
)


@dataclass(frozen=True)
class UserModel:
    """Stochastic click behavior.

    preferred_type       the type the user leans toward
    click_prob           chance the user clicks at all on a page
    preference_strength  probability the click goes to the preferred
                         type when the page shows both; the remainder
                         goes uniformly to the other types' slots, so
                         strength 0.5 on a two-type page carries no
                         net signal regardless of page composition
    """

    preferred_type: TypeLabel
    click_prob: float = 1.0
    preference_strength: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.click_prob <= 1.0:
            raise ValueError("click_prob must be in [0, 1]")
        if not 0.0 <= self.preference_strength <= 1.0:
            raise ValueError("preference_strength must be in [0, 1]")


@dataclass(frozen=True)
class Scenario:
    name: str
    iterations: int
    config: AppConfig
    user_preferred_type: str
    user_click_prob: float
    user_preference_strength: float
    corpus: str
    click_feed: str = "balanced"
    lower_liberal: Optional[float] = None
    upper_liberal: Optional[float] = None
    bias_map: Optional[str] = None

    def user_model(self) -> UserModel:
        labels = self.config.labels()
        for label in labels:
            if label.name == self.user_preferred_type:
                return UserModel(
                    preferred_type=label,
                    click_prob=self.user_click_prob,
                    preference_strength=self.user_preference_strength,
                )
        raise ConfigError(
            f"scenario user prefers unknown type {self.user_preferred_type!r}"
        )


@dataclass(frozen=True)
class RunRow:
    """One emitted line: session snapshot after iteration ``t``.

    ``clicked_type`` names the type clicked during the step that led
    here, empty for the starting row and for skipped pages.
    """

    t: int
    pct_lib_unfiltered: float
    pct_lib_balanced: float
    lower: float
    upper: float
    clicked_type: str

    def as_dict(self) -> dict:
        return {field: getattr(self, field) for field in CSV_FIELDS}


@dataclass(frozen=True)
class RunSummary:
    iterations: int
    clicks: int
    final_pct_unfiltered: float
    final_pct_balanced: float
    first_cap_contact: Optional[int]


@dataclass(frozen=True)
class RunResult:
    scenario: str
    seed: int
    rows: tuple[RunRow, ...]
    summary: RunSummary


def load_scenario(name_or_path: str, overrides: Optional[dict] = None) -> Scenario:
    """Load a packaged preset by name, or any JSON scenario by path."""
    text: Optional[str] = None
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        text = path.read_text(encoding="utf-8")
        default_name = path.stem
    else:
        packaged = resources.files("balancednews").joinpath(
            f"data/scenarios/{name_or_path}.json"
        )
        if packaged.is_file():
            text = packaged.read_text(encoding="utf-8")
            default_name = name_or_path
        elif path.exists():
            text = path.read_text(encoding="utf-8")
            default_name = path.stem
    if text is None:
        raise ConfigError(f"no scenario named or located at {name_or_path!r}")

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {name_or_path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")

    config_raw = raw.get("config", {})
    if not isinstance(config_raw, dict):
        raise ConfigError("scenario config must be an object")
    if "type_names" in config_raw:
        config_raw = dict(config_raw, type_names=tuple(config_raw["type_names"]))
    try:
        config = replace(AppConfig(), **config_raw)
    except TypeError as exc:
        raise ConfigError(f"bad scenario config: {exc}") from exc
    config.validate()

    user = raw.get("user", {})
    if not isinstance(user, dict) or "preferred_type" not in user:
        raise ConfigError("scenario needs a user object with preferred_type")

    scenario = Scenario(
        name=raw.get("name", default_name),
        iterations=int(raw.get("iterations", 30)),
        config=config,
        user_preferred_type=user["preferred_type"],
        user_click_prob=float(user.get("click_prob", 1.0)),
        user_preference_strength=float(user.get("preference_strength", 1.0)),
        corpus=raw.get("corpus", "synthetic:400"),
        click_feed=raw.get("click_feed", "balanced"),
        lower_liberal=raw.get("lower_liberal"),
        upper_liberal=raw.get("upper_liberal"),
        bias_map=raw.get("bias_map"),
    )
    if scenario.iterations < 0:
        raise ConfigError("iterations must be non-negative")
    if scenario.click_feed not in ("unfiltered", "balanced"):
        raise ConfigError(f"unknown click_feed {scenario.click_feed!r}")
    if overrides:
        scenario = replace(scenario, **overrides)
    scenario.user_model()
    return scenario


def build_scenario_pools(scenario: Scenario) -> Pools:
    """Resolve the scenario's corpus spec into serving pools.

    ``synthetic:N`` generates N articles per type in memory; anything
    else is a JSONL corpus path and needs ``bias_map`` set as well.
    """
    labels = scenario.config.labels()
    if scenario.corpus.startswith("synthetic:"):
        per_type = int(scenario.corpus.split(":", 1)[1])
        return build_pools(make_articles(per_type, labels), len(labels))
    if not scenario.bias_map:
        raise ConfigError("file corpus requires a bias_map path")
    articles, _summary = ingest_corpus(scenario.corpus, scenario.bias_map, labels)
    return build_pools(articles, len(labels))


def _sample_from_slots(
    model: UserModel, slots: Sequence[tuple[str, int]], rng: Random
) -> Optional[str]:
    """Pick an article id from (id, type index) slots, or None to skip."""
    if not slots:
        return None
    if rng.random() >= model.click_prob:
        return None
    preferred = [aid for aid, idx in slots if idx == model.preferred_type.index]
    others = [aid for aid, idx in slots if idx != model.preferred_type.index]
    if not preferred:
        # Preferred type absent: the click lands anywhere on the page.
        return rng.choice(others)
    if not others:
        return rng.choice(preferred)
    if rng.random() < model.preference_strength:
        return rng.choice(preferred)
    return rng.choice(others)


def sample_click(model: UserModel, page, rng: Random) -> Optional[str]:
    """Sample the user's click on a composed page."""
    slots = [(article.id, article.type.index) for article in page.slots]
    return _sample_from_slots(model, slots, rng)


def _row(state: SessionState, clicked_type: str) -> RunRow:
    point = state.history[-1]
    return RunRow(
        t=point.t,
        pct_lib_unfiltered=point.pct_liberal_unfiltered,
        pct_lib_balanced=point.pct_liberal_balanced,
        lower=point.lower_liberal,
        upper=point.upper_liberal,
        clicked_type=clicked_type,
    )


def _cap_contact(point: HistoryPoint, page_size: int) -> bool:
    floor_slots = math.ceil(point.lower_liberal * page_size - 1e-9)
    cap_slots = math.floor(point.upper_liberal * page_size + 1e-9)
    count = round(point.pct_liberal_balanced * page_size)
    return count >= cap_slots or count <= floor_slots


def run_scenario(
    scenario: Scenario,
    seed: int,
    iterations: Optional[int] = None,
    log: Optional[EventLog] = None,
    pools: Optional[Pools] = None,
) -> RunResult:
    """Drive one session with the scenario's scripted user."""
    steps = scenario.iterations if iterations is None else iterations
    if steps < 0:
        raise ValueError("iterations must be non-negative")
    pools = pools if pools is not None else build_scenario_pools(scenario)
    model = scenario.user_model()
    user_rng = Random(f"user:{seed}")

    session_id = f"sim-{scenario.name}-{seed}"
    state, events = create_session(
        session_id,
        scenario.config,
        seed,
        pools,
        scenario.lower_liberal,
        scenario.upper_liberal,
    )
    if log is not None:
        log.append(session_id, events)

    rows = [_row(state, "")]
    clicks = 0
    first_contact: Optional[int] = None
    if _cap_contact(state.history[-1], scenario.config.page_size):
        first_contact = 0

    for _step in range(steps):
        page = state.page(scenario.click_feed)
        article_id = sample_click(model, page, user_rng)
        if article_id is None:
            state, events = advance_no_click(state, pools)
            clicked = ""
        else:
            clicked = page.find(article_id).type.name
            state, events = apply_click(state, pools, scenario.click_feed, article_id)
            clicks += 1
        if log is not None:
            log.append(session_id, events)
        rows.append(_row(state, clicked))
        if first_contact is None and _cap_contact(
            state.history[-1], scenario.config.page_size
        ):
            first_contact = state.t

    summary = RunSummary(
        iterations=steps,
        clicks=clicks,
        final_pct_unfiltered=rows[-1].pct_lib_unfiltered,
        final_pct_balanced=rows[-1].pct_lib_balanced,
        first_cap_contact=first_contact,
    )
    return RunResult(
        scenario=scenario.name, seed=seed, rows=tuple(rows), summary=summary
    )


def run_scenario_http(
    scenario: Scenario,
    seed: int,
    base_url: str,
    iterations: Optional[int] = None,
) -> RunResult:
    """Drive a remote service instead of the in-process session layer.

    The HTTP surface has no page-skip operation, so iterations where
    the scripted user does not click leave the remote session where it
    is; the emitted row repeats the current state.
    """
    import httpx

    steps = scenario.iterations if iterations is None else iterations
    model = scenario.user_model()
    labels = scenario.config.labels()
    index_by_name = {label.name: label.index for label in labels}
    user_rng = Random(f"user:{seed}")

    def slots_of(feeds: dict) -> list[tuple[str, int]]:
        return [
            (slot["id"], index_by_name[slot["type"]])
            for slot in feeds[scenario.click_feed]["slots"]
        ]

    def row_from(point: dict, clicked: str) -> RunRow:
        return RunRow(
            t=point["t"],
            pct_lib_unfiltered=point["pct_liberal_unfiltered"],
            pct_lib_balanced=point["pct_liberal_balanced"],
            lower=point["lower_liberal"],
            upper=point["upper_liberal"],
            clicked_type=clicked,
        )

    with httpx.Client(base_url=base_url, timeout=30.0) as client:
        body: dict = {"seed": seed}
        if scenario.lower_liberal is not None:
            body["lower_liberal"] = scenario.lower_liberal
        if scenario.upper_liberal is not None:
            body["upper_liberal"] = scenario.upper_liberal
        response = client.post("/sessions", json=body)
        response.raise_for_status()
        created = response.json()
        session_id = created["session_id"]
        feeds = created["feeds"]
        rows = [row_from(created["history"][-1], "")]

        clicks = 0
        for _step in range(steps):
            slots = slots_of(feeds)
            article_id = _sample_from_slots(model, slots, user_rng)
            if article_id is None:
                rows.append(replace(rows[-1], clicked_type=""))
                continue
            clicked = next(
                labels[idx].name for aid, idx in slots if aid == article_id
            )
            response = client.post(
                f"/sessions/{session_id}/clicks",
                json={"feed": scenario.click_feed, "article_id": article_id},
            )
            response.raise_for_status()
            payload = response.json()
            feeds = payload["feeds"]
            rows.append(row_from(payload["history_point"], clicked))
            clicks += 1

    summary = RunSummary(
        iterations=steps,
        clicks=clicks,
        final_pct_unfiltered=rows[-1].pct_lib_unfiltered,
        final_pct_balanced=rows[-1].pct_lib_balanced,
        first_cap_contact=None,
    )
    return RunResult(
        scenario=scenario.name, seed=seed, rows=tuple(rows), summary=summary
    )


def emit(result: RunResult, path: str | Path, fmt: str = "csv") -> Path:
    """Write the run rows atomically: temp file, then rename over."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    target = Path(path)
    directory = target.parent
    if not directory.is_dir():
        raise FileNotFoundError(f"output directory {directory} does not exist")
    descriptor, temp_name = tempfile.mkstemp(
        dir=directory, prefix=f".{target.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(descriptor, "w", encoding="utf-8", newline="") as handle:
            if fmt == "csv":
                writer = csv.DictWriter(
                    handle, fieldnames=CSV_FIELDS, lineterminator="\n"
                )
                writer.writeheader()
                for row in result.rows:
                    writer.writerow(row.as_dict())
            else:
                for row in result.rows:
                    handle.write(json.dumps(row.as_dict()) + "\n")
        os.replace(temp_name, target)
    except BaseException:
        try:
            os.unlink(temp_name)
        except OSError:
            pass
        raise
    return target
