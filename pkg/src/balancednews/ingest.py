"""Corpus loading, source-to-type mapping, and serving pools.

The offline path reads a JSONL corpus and a CSV bias map, classifies
each article by its source domain, and builds per-type pools sorted by
rating. A pluggable live-source hook exists for query-driven fetching;
the package ships only a stub implementation, and an unconfigured
source fails loudly instead of silently returning nothing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .bandit import TypeLabel
from .errors import ConfigError, SourceError
from .feed import Article


@dataclass(frozen=True)
class CorpusRecord:
    """One raw corpus entry, before classification."""

    id: str
    title: str
    url: str
    source_domain: str
    rating: Optional[float]
    published_at: datetime


@dataclass(frozen=True)
class BiasMapping:
    """Lowercase source domain -> type name."""

    entries: dict[str, str]

    def type_name_for(self, domain: str) -> Optional[str]:
        return self.entries.get(normalize_domain(domain))


@dataclass
class IngestionSummary:
    loaded: int = 0
    classified: int = 0
    skipped_unmapped: int = 0
    skipped_malformed: int = 0
    reasons: list[str] = field(default_factory=list)

    def line(self) -> str:
        return (
            f"loaded={self.loaded} classified={self.classified} "
            f"skipped_unmapped={self.skipped_unmapped} "
            f"skipped_malformed={self.skipped_malformed}"
        )


def normalize_domain(raw: str) -> str:
    """Lowercase, drop any scheme, and strip one leading ``www.``.

    Other subdomains are left alone on purpose: ``blogs.example.com``
    is a different publication surface than ``example.com`` and must
    be mapped explicitly or stay unclassified.
    """
    domain = raw.strip().lower()
    if "://" in domain:
        domain = domain.split("://", 1)[1]
    domain = domain.split("/", 1)[0]
    if domain.startswith("www."):
        domain = domain[4:]
    return domain


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        raise ValueError("timestamp lacks a UTC offset")
    return parsed.astimezone(timezone.utc)


def _record_from_obj(obj: object) -> CorpusRecord:
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    for key in ("id", "title", "url", "source_domain", "published_at"):
        value = obj.get(key)
        if not isinstance(value, str) or not value.strip():
            raise ValueError(f"missing or empty field {key!r}")
    rating = obj.get("rating")
    if rating is not None:
        if isinstance(rating, bool) or not isinstance(rating, (int, float)):
            raise ValueError("rating must be a number")
        rating = float(rating)
    return CorpusRecord(
        id=obj["id"],
        title=obj["title"],
        url=obj["url"],
        source_domain=obj["source_domain"],
        rating=rating,
        published_at=parse_timestamp(obj["published_at"]),
    )


def load_corpus(path: str | Path) -> tuple[list[CorpusRecord], list[tuple[int, str]]]:
    """Read a JSONL corpus.

    Returns the well-formed records plus a list of (line number,
    reason) pairs for lines that could not be used. Blank lines are
    ignored entirely.
    """
    records: list[CorpusRecord] = []
    malformed: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(_record_from_obj(obj))
            except (ValueError, TypeError) as exc:
                malformed.append((line_no, str(exc)))
    return records, malformed


def load_bias_map(path: str | Path, labels: Sequence[TypeLabel]) -> BiasMapping:
    """Read the domain-to-type CSV.

    Expects a ``source_domain,type_name`` header; ``#`` comment lines
    and blank lines are skipped. Unknown type names and duplicate
    domains are configuration errors, not data to skip.
    """
    known = {label.name for label in labels}
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = csv.reader(
            line for line in handle if line.strip() and not line.lstrip().startswith("#")
        )
        header = next(rows, None)
        if header is None:
            raise ConfigError(f"bias map {path} is empty")
        if [cell.strip().lower() for cell in header] != ["source_domain", "type_name"]:
            raise ConfigError(
                "bias map must start with a 'source_domain,type_name' header"
            )
        for row in rows:
            if len(row) != 2:
                raise ConfigError(f"bias map row has {len(row)} cells, expected 2: {row!r}")
            domain = normalize_domain(row[0])
            type_name = row[1].strip()
            if not domain:
                raise ConfigError("bias map row has an empty domain")
            if type_name not in known:
                raise ConfigError(f"bias map names unknown type {type_name!r}")
            if domain in entries:
                raise ConfigError(f"duplicate domain in bias map: {domain!r}")
            entries[domain] = type_name
    return BiasMapping(entries=entries)


def classify(
    record: CorpusRecord, mapping: BiasMapping, labels: Sequence[TypeLabel]
) -> Optional[Article]:
    """Attach a type to a record, or return None when its domain is unmapped.

    A missing rating becomes 0.0 here: unknown popularity ranks last,
    it does not block the article.
    """
    type_name = mapping.type_name_for(record.source_domain)
    if type_name is None:
        return None
    label = next(label for label in labels if label.name == type_name)
    return Article(
        id=record.id,
        title=record.title,
        url=record.url,
        source_domain=normalize_domain(record.source_domain),
        type=label,
        rating=record.rating if record.rating is not None else 0.0,
        published_at=record.published_at,
    )


def ingest_corpus(
    corpus_path: str | Path,
    bias_path: str | Path,
    labels: Sequence[TypeLabel],
) -> tuple[list[Article], IngestionSummary]:
    """Load, classify, and account for every line of a corpus file."""
    mapping = load_bias_map(bias_path, labels)
    records, malformed = load_corpus(corpus_path)
    summary = IngestionSummary()
    summary.skipped_malformed = len(malformed)
    summary.reasons = [f"line {n}: {reason}" for n, reason in malformed]
    articles: list[Article] = []
    for record in records:
        article = classify(record, mapping, labels)
        if article is None:
            summary.skipped_unmapped += 1
        else:
            articles.append(article)
    summary.classified = len(articles)
    summary.loaded = summary.classified + summary.skipped_unmapped + summary.skipped_malformed
    return articles, summary


def build_pools(
    articles: Sequence[Article], num_types: int
) -> tuple[tuple[Article, ...], ...]:
    """Partition articles by type and sort each pool into serving order.

    Order: rating descending, then recency descending, then id, so the
    pools are total-ordered and every composition is reproducible.
    """
    buckets: list[list[Article]] = [[] for _ in range(num_types)]
    for article in articles:
        if not 0 <= article.type.index < num_types:
            raise ValueError(f"article {article.id!r} has out-of-range type index")
        buckets[article.type.index].append(article)
    for bucket in buckets:
        bucket.sort(key=lambda a: (-a.rating, -a.published_at.timestamp(), a.id))
    return tuple(tuple(bucket) for bucket in buckets)


class LiveSource(Protocol):
    """Anything that can turn a query string into corpus records."""

    def search(self, query: str) -> list[CorpusRecord]: ...


class StubSource:
    """In-memory live source: case-insensitive substring match on titles."""

    def __init__(self, records: Sequence[CorpusRecord]):
        self._records = list(records)

    def search(self, query: str) -> list[CorpusRecord]:
        needle = query.strip().lower()
        if not needle:
            return list(self._records)
        return [r for r in self._records if needle in r.title.lower()]


def fetch_live(query: str, source: Optional[LiveSource]) -> list[CorpusRecord]:
    """Run a query against the configured live source.

    No source configured is an explicit error; an empty result from a
    working source is a perfectly fine answer.
    """
    if source is None:
        raise ConfigError("no live source configured")
    try:
        return source.search(query)
    except Exception as exc:
        raise SourceError(f"live source failed: {exc}") from exc
