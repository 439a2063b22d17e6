"""Descriptive statistics over a labeled corpus: domain rankings, author
demographics, posting sources, post types, and retention timing."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Sequence

from .model import Post
from .urls import extract_urls, registrable_domain, url_host

WITHIN_HOURS = 5.0


class AnalyticsError(ValueError):
    pass


@lru_cache(maxsize=1)
def app_source_table() -> dict[str, frozenset[str]]:
    raw = json.loads(
        resources.files("sentinel.data").joinpath("app_sources.json").read_text("utf-8")
    )
    return {
        "mobile": frozenset(raw["mobile"]),
        "web": frozenset(raw["web"]),
    }


def app_source_bucket(app_name: Optional[str]) -> str:
    """mobile / web / other. No application name means the post came
    through the website itself."""
    if app_name is None:
        return "web"
    table = app_source_table()
    if app_name in table["mobile"]:
        return "mobile"
    if app_name in table["web"]:
        return "web"
    return "other"


@dataclass(frozen=True)
class RetentionSummary:
    count: int
    median_hours: float
    mean_hours: float
    stddev_hours: float
    min_hours: float
    max_hours: float
    within_5h_fraction: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "median_hours": self.median_hours,
            "mean_hours": self.mean_hours,
            "stddev_hours": self.stddev_hours,
            "min_hours": self.min_hours,
            "max_hours": self.max_hours,
            "within_5h_fraction": self.within_5h_fraction,
        }


def retention_summary(posts: Iterable[Post]) -> RetentionSummary:
    """Stats over captured_time - created_time for posts carrying both.
    Population standard deviation; hours throughout."""
    hours = [
        (p.captured_time - p.created_time) / 3600.0
        for p in posts
        if p.captured_time is not None
    ]
    if not hours:
        raise AnalyticsError("no posts carry a captured_time")
    return RetentionSummary(
        count=len(hours),
        median_hours=statistics.median(hours),
        mean_hours=statistics.mean(hours),
        stddev_hours=statistics.pstdev(hours) if len(hours) > 1 else 0.0,
        min_hours=min(hours),
        max_hours=max(hours),
        within_5h_fraction=sum(h < WITHIN_HOURS for h in hours) / len(hours),
    )


Breakdown = dict[str, dict]


def _share_table(counts: dict[str, int]) -> Breakdown:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {
        value: {"count": count, "share": count / total}
        for value, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    }


def _domain_of(url: str) -> Optional[str]:
    try:
        return registrable_domain(url_host(url))
    except ValueError:
        return None


@dataclass(frozen=True)
class CorpusStats:
    domains: dict[str, Breakdown]
    entity_kinds: dict[str, Breakdown]
    genders: dict[str, Breakdown]
    app_sources: dict[str, Breakdown]
    post_types: dict[str, Breakdown]
    retention: Optional[RetentionSummary]

    def to_dict(self) -> dict:
        return {
            "domains": self.domains,
            "entity_kinds": self.entity_kinds,
            "genders": self.genders,
            "app_sources": self.app_sources,
            "post_types": self.post_types,
            "retention": self.retention.to_dict() if self.retention else None,
        }

    def top_domains(self, label: str, n: int = 10) -> list[tuple[str, int, float]]:
        table = self.domains.get(label, {})
        return [
            (domain, entry["count"], entry["share"])
            for domain, entry in list(table.items())[:n]
        ]


def compute_stats(corpus) -> CorpusStats:
    """Exact counts per label class. Domain shares are over URL instances,
    everything else is over posts. A class absent from the corpus simply
    yields empty breakdowns."""
    if corpus.labels is None:
        raise AnalyticsError("corpus carries no labels")
    labels = ("malicious", "legitimate")
    domain_counts: dict[str, dict[str, int]] = {l: {} for l in labels}
    kind_counts: dict[str, dict[str, int]] = {l: {} for l in labels}
    gender_counts: dict[str, dict[str, int]] = {l: {} for l in labels}
    source_counts: dict[str, dict[str, int]] = {l: {} for l in labels}
    type_counts: dict[str, dict[str, int]] = {l: {} for l in labels}
    malicious_posts: list[Post] = []

    for post in corpus.posts:
        label = corpus.label_of(post.post_id)
        if label not in labels:
            raise AnalyticsError(f"post {post.post_id!r} has no label")
        if label == "malicious":
            malicious_posts.append(post)
        for url in extract_urls(post):
            domain = _domain_of(url)
            if domain is not None:
                domain_counts[label][domain] = domain_counts[label].get(domain, 0) + 1
        for table, value in (
            (kind_counts, post.author.kind),
            (gender_counts, post.author.gender),
            (source_counts, app_source_bucket(post.app_name)),
            (type_counts, post.post_type),
        ):
            table[label][value] = table[label].get(value, 0) + 1

    retention = None
    if any(p.captured_time is not None for p in malicious_posts):
        retention = retention_summary(malicious_posts)

    return CorpusStats(
        domains={l: _share_table(domain_counts[l]) for l in labels},
        entity_kinds={l: _share_table(kind_counts[l]) for l in labels},
        genders={l: _share_table(gender_counts[l]) for l in labels},
        app_sources={l: _share_table(source_counts[l]) for l in labels},
        post_types={l: _share_table(type_counts[l]) for l in labels},
        retention=retention,
    )
