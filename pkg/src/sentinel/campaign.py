"""Clustering-based campaign detection baseline.

Posts land in the same cluster when they share a URL or when their
normalized texts are near-duplicates. A cluster is a campaign when it is
both distributed (more than 5 distinct authors) and bursty (median gap
between consecutive posts under 90 minutes); both thresholds are strict.
The false-negative rate is the fraction of known-bad posts such a
detector would never look at.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .model import Post
from .urls import extract_urls

JACCARD_THRESHOLD = 0.8
DISTRIBUTED_AUTHORS = 5  # campaign needs strictly more
BURSTY_MEDIAN_MINUTES = 90.0  # campaign needs strictly less


@dataclass(frozen=True)
class Cluster:
    post_ids: tuple[str, ...]
    author_count: int
    created_times: tuple[int, ...]  # sorted ascending
    representative_text: str

    def __len__(self) -> int:
        return len(self.post_ids)


@dataclass(frozen=True)
class CampaignVerdict:
    is_campaign: bool
    distributed: bool
    bursty: bool
    author_count: int
    median_gap_minutes: Optional[float]
    reasons: tuple[str, ...]


def normalize_text(message: Optional[str]) -> str:
    if not message:
        return ""
    return " ".join(message.lower().split())


def shingles(normalized: str) -> frozenset[tuple[str, ...]]:
    """2-word shingles; a single-word text keeps its one word so identical
    short texts still match, and an empty text matches nothing."""
    words = normalized.split()
    if not words:
        return frozenset()
    if len(words) == 1:
        return frozenset({(words[0],)})
    return frozenset(zip(words, words[1:]))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


SimilarityFn = Callable[[frozenset, frozenset], float]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def cluster_posts(
    posts: Sequence[Post],
    similarity: SimilarityFn = jaccard,
    threshold: float = JACCARD_THRESHOLD,
    resolved_urls: Optional[dict[str, tuple[str, ...]]] = None,
) -> list[Cluster]:
    """Connected components of the share-a-URL / similar-text relation.

    resolved_urls overrides the raw extracted URLs per post id where a
    resolution pass ran; posts without an entry fall back to raw extraction.
    Output is sorted and independent of input order.
    """
    posts = list(posts)
    n = len(posts)
    uf = _UnionFind(n)

    url_index: dict[str, int] = {}
    for i, post in enumerate(posts):
        if resolved_urls is not None and post.post_id in resolved_urls:
            urls: Iterable[str] = resolved_urls[post.post_id]
        else:
            urls = extract_urls(post)
        for url in urls:
            if url in url_index:
                uf.union(url_index[url], i)
            else:
                url_index[url] = i

    # Text edges: only pairs sharing at least one shingle can clear the
    # threshold, so candidates come from an inverted shingle index.
    post_shingles = [shingles(normalize_text(p.message)) for p in posts]
    shingle_index: dict[tuple[str, ...], list[int]] = {}
    for i, sh in enumerate(post_shingles):
        for s in sh:
            shingle_index.setdefault(s, []).append(i)
    seen_pairs: set[tuple[int, int]] = set()
    for bucket in shingle_index.values():
        for a_pos in range(len(bucket)):
            for b_pos in range(a_pos + 1, len(bucket)):
                pair = (bucket[a_pos], bucket[b_pos])
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                if similarity(post_shingles[pair[0]], post_shingles[pair[1]]) >= threshold:
                    uf.union(pair[0], pair[1])

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(uf.find(i), []).append(i)

    clusters: list[Cluster] = []
    for group in members.values():
        group_posts = [posts[i] for i in group]
        ordered = sorted(group_posts, key=lambda p: (p.created_time, p.post_id))
        clusters.append(
            Cluster(
                post_ids=tuple(sorted(p.post_id for p in group_posts)),
                author_count=len({p.author.entity_id for p in group_posts}),
                created_times=tuple(p.created_time for p in ordered),
                representative_text=normalize_text(ordered[0].message),
            )
        )
    clusters.sort(key=lambda c: c.post_ids)
    return clusters


def median_gap_minutes(created_times: Sequence[int]) -> Optional[float]:
    """Median of consecutive gaps over already-sorted times, in minutes.
    None when fewer than two posts exist (no gaps to measure)."""
    if len(created_times) < 2:
        return None
    gaps = sorted(
        (created_times[i + 1] - created_times[i]) / 60.0
        for i in range(len(created_times) - 1)
    )
    mid = len(gaps) // 2
    if len(gaps) % 2 == 1:
        return gaps[mid]
    return (gaps[mid - 1] + gaps[mid]) / 2.0


def is_campaign(cluster: Cluster) -> CampaignVerdict:
    if not cluster.post_ids:
        raise ValueError("empty cluster")
    distributed = cluster.author_count > DISTRIBUTED_AUTHORS
    gap = median_gap_minutes(cluster.created_times)
    bursty = gap is not None and gap < BURSTY_MEDIAN_MINUTES
    reasons = []
    if distributed:
        reasons.append(f"{cluster.author_count} authors > {DISTRIBUTED_AUTHORS}")
    else:
        reasons.append(f"{cluster.author_count} authors, needs > {DISTRIBUTED_AUTHORS}")
    if gap is None:
        reasons.append("fewer than 2 posts, no gap to measure")
    elif bursty:
        reasons.append(f"median gap {gap:g} min < {BURSTY_MEDIAN_MINUTES:g}")
    else:
        reasons.append(f"median gap {gap:g} min, needs < {BURSTY_MEDIAN_MINUTES:g}")
    return CampaignVerdict(
        is_campaign=distributed and bursty,
        distributed=distributed,
        bursty=bursty,
        author_count=cluster.author_count,
        median_gap_minutes=gap,
        reasons=tuple(reasons),
    )


def false_negative_rate(
    posts: Sequence[Post],
    similarity: SimilarityFn = jaccard,
    threshold: float = JACCARD_THRESHOLD,
    resolved_urls: Optional[dict[str, tuple[str, ...]]] = None,
) -> float:
    """Fraction of these (ground-truth malicious) posts that end up in no
    campaign-flagged cluster."""
    posts = list(posts)
    if not posts:
        raise ValueError("no posts to evaluate")
    clusters = cluster_posts(posts, similarity, threshold, resolved_urls)
    caught = 0
    for cluster in clusters:
        if is_campaign(cluster).is_campaign:
            caught += len(cluster)
    return 1.0 - caught / len(posts)
