"""Deterministic synthetic corpus generation.

Used for the bundled demo corpus, the simulator's self-contained
scenarios, and tests. Per-type pools are generated symmetrically:
article i of every type shares the same rating and timestamp, so
swapping the type order produces a mirror-image corpus.
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Sequence

from .bandit import TypeLabel, make_labels
from .feed import Article
from .ingest import CorpusRecord

_TOPICS = (
    "budget", "election", "climate", "healthcare", "economy",
    "courts", "energy", "border", "schools", "transit",
)
_FORMS = ("debate", "report", "analysis", "hearing", "forecast")

_EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)

# Invented outlets per type for the demo data. The names are fiction;
# only the left/right split matters.
DEMO_DOMAINS = {
    "liberal": (
        "blueledger.example.com",
        "harborpost.example.com",
        "citizenlamp.example.com",
    ),
    "conservative": (
        "redherald.example.com",
        "pinestandard.example.com",
        "plainsgazette.example.com",
    ),
}


def _title(type_name: str, i: int) -> str:
    topic = _TOPICS[i % len(_TOPICS)]
    form = _FORMS[(i // len(_TOPICS)) % len(_FORMS)]
    return f"{topic.capitalize()} {form} {i}: the {type_name} view"


def make_records(
    per_type: int,
    type_names: Sequence[str] = ("liberal", "conservative"),
    domains: dict[str, Sequence[str]] | None = None,
) -> list[CorpusRecord]:
    """Generate ``per_type`` records for each type, symmetric across types."""
    domains = domains or {
        name: DEMO_DOMAINS.get(name, (f"{name}.example.com",)) for name in type_names
    }
    records = []
    for i in range(per_type):
        for name in type_names:
            pool = domains[name]
            domain = pool[i % len(pool)]
            records.append(
                CorpusRecord(
                    id=f"{name[:3]}-{i:05d}",
                    title=_title(name, i),
                    url=f"https://{domain}/story/{i}",
                    source_domain=domain,
                    rating=float(per_type - i),
                    published_at=_EPOCH + timedelta(minutes=i),
                )
            )
    return records


def make_articles(
    per_type: int, labels: Sequence[TypeLabel] | None = None
) -> list[Article]:
    """Generate classified articles directly, skipping the bias map."""
    labels = tuple(labels) if labels else make_labels(["liberal", "conservative"])
    articles = []
    for i in range(per_type):
        for label in labels:
            domain = f"{label.name}.example.com"
            articles.append(
                Article(
                    id=f"{label.name}-{i:05d}",
                    title=_title(label.name, i),
                    url=f"https://{domain}/story/{i}",
                    source_domain=domain,
                    type=label,
                    rating=float(per_type - i),
                    published_at=_EPOCH + timedelta(minutes=i),
                )
            )
    return articles


def write_corpus_jsonl(records: Sequence[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(
                json.dumps(
                    {
                        "id": record.id,
                        "title": record.title,
                        "url": record.url,
                        "source_domain": record.source_domain,
                        "rating": record.rating,
                        "published_at": record.published_at.isoformat().replace(
                            "+00:00", "Z"
                        ),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def write_bias_map_csv(
    path: str | Path, domains: dict[str, Sequence[str]] | None = None
) -> None:
    domains = domains or DEMO_DOMAINS
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# maps source domains to content types\n")
        handle.write("source_domain,type_name\n")
        for type_name, pool in domains.items():
            for domain in pool:
                handle.write(f"{domain},{type_name}\n")
