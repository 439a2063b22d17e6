"""URL handling: extraction from post text, redirect-chain resolution with
bounded budgets, and host/registrable-domain parsing against a bundled
public suffix snapshot.

Resolution never fetches landing-page content; it only follows 3xx chains
so blacklist lookups see the final destination. The fetcher is injected so
every test runs offline against an in-memory redirect map.
"""

from __future__ import annotations

import ipaddress
import json
import re
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Optional
from urllib.parse import urljoin, urlsplit

from .model import Post, UrlRecord

# scheme://... or www.... tokens, terminated at whitespace; trailing
# sentence punctuation is stripped afterwards so "see http://a.com." does
# not capture the period.
_URL_RE = re.compile(r"(?:https?://|www\.)[^\s<>\"]+", re.IGNORECASE)
_TRAILING_PUNCT = ".,;:!?)'\""

# A fetcher answers one URL with (status_code, location_header_or_None).
Fetcher = Callable[[str, float], tuple[int, Optional[str]]]


@dataclass(frozen=True)
class ResolutionPolicy:
    max_redirects: int = 10
    per_request_timeout_ms: int = 5000
    total_budget_ms: int = 15000
    resolver_mode: str = "fixture"

    def validate(self) -> None:
        if self.max_redirects < 1:
            raise ValueError("max_redirects must be >= 1")
        if self.per_request_timeout_ms <= 0 or self.total_budget_ms <= 0:
            raise ValueError("timeouts must be positive")


def extract_urls(p: Post) -> list[str]:
    """All URL-shaped substrings of the message, in order, then the link
    field appended last; deduplicated on first occurrence. Scheme-less
    www. tokens come back with http:// prefixed."""
    seen: set[str] = set()
    out: list[str] = []

    def add(candidate: str) -> None:
        candidate = candidate.rstrip(_TRAILING_PUNCT)
        if not candidate:
            return
        if candidate.lower().startswith("www."):
            candidate = "http://" + candidate
        if candidate not in seen:
            seen.add(candidate)
            out.append(candidate)

    if p.message:
        for match in _URL_RE.finditer(p.message):
            add(match.group(0))
    if p.link:
        add(p.link)
    return out


class FixtureFetcher:
    """In-memory redirect oracle: maps url -> (status, location).

    Unknown URLs answer 200 with no location (a terminal page), so fixtures
    only need to spell out the redirecting hops.
    """

    def __init__(self, mapping: dict[str, tuple[int, Optional[str]]]):
        self._map = dict(mapping)

    @classmethod
    def from_file(cls, path: str) -> "FixtureFetcher":
        mapping: dict[str, tuple[int, Optional[str]]] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                mapping[entry["url"]] = (int(entry["status"]), entry.get("location"))
        return cls(mapping)

    def __call__(self, url: str, timeout_s: float) -> tuple[int, Optional[str]]:
        return self._map.get(url, (200, None))


def live_fetcher(url: str, timeout_s: float) -> tuple[int, Optional[str]]:
    """HEAD with GET fallback, redirects not followed (we walk them)."""
    import requests

    try:
        resp = requests.head(url, allow_redirects=False, timeout=timeout_s)
        if resp.status_code in (405, 501):
            resp = requests.get(
                url, allow_redirects=False, timeout=timeout_s, stream=True
            )
            resp.close()
        return resp.status_code, resp.headers.get("Location")
    except requests.RequestException:
        raise IOError(f"fetch failed for {url}")


def _parse_host(url: str) -> Optional[str]:
    try:
        parts = urlsplit(url)
    except ValueError:
        return None
    if parts.scheme not in ("http", "https") or not parts.netloc:
        return None
    host = parts.hostname
    return host.lower() if host else None


def resolve(raw: str, policy: ResolutionPolicy, fetcher: Fetcher) -> UrlRecord:
    """Follow 3xx chains up to max_redirects. Failures are encoded in
    resolution_status, never raised: unresolved on timeout / network error /
    redirect-limit, invalid on unparseable input."""
    policy.validate()
    host = _parse_host(raw)
    if host is None:
        return UrlRecord(
            raw_url=raw, resolved_url=None, domain="", resolution_status="invalid"
        )

    deadline = time.monotonic() + policy.total_budget_ms / 1000.0
    timeout_s = policy.per_request_timeout_ms / 1000.0
    current = raw
    for _ in range(policy.max_redirects + 1):
        if time.monotonic() > deadline:
            return _unresolved(raw, current)
        try:
            status, location = fetcher(current, timeout_s)
        except Exception:
            return _unresolved(raw, current)
        if 300 <= status < 400 and location:
            nxt = urljoin(current, location)
            if _parse_host(nxt) is None:
                return _unresolved(raw, current)
            current = nxt
            continue
        if status >= 400:
            return _unresolved(raw, current)
        return UrlRecord(
            raw_url=raw,
            resolved_url=current,
            domain=registrable_domain(current),
            resolution_status="resolved",
        )
    # Chain longer than max_redirects.
    return _unresolved(raw, current)


def _unresolved(raw: str, best_known: str) -> UrlRecord:
    host = _parse_host(best_known) or _parse_host(raw)
    domain = registrable_domain(best_known) if host else ""
    return UrlRecord(
        raw_url=raw, resolved_url=None, domain=domain, resolution_status="unresolved"
    )


# ---------------------------------------------------------------------------
# Public suffix handling.


class PublicSuffixList:
    """Match ICANN-style suffix rules (plain, wildcard, exception) against a
    host. Hosts matching no rule fall back to the default '*' rule, i.e. the
    suffix is the last label."""

    def __init__(self, rules: list[str]):
        self.exact: set[str] = set()
        self.wildcard: set[str] = set()  # stored without the leading "*."
        self.exception: set[str] = set()  # stored without the leading "!"
        for rule in rules:
            rule = rule.strip().lower()
            if not rule or rule.startswith("//"):
                continue
            if rule.startswith("!"):
                self.exception.add(rule[1:])
            elif rule.startswith("*."):
                self.wildcard.add(rule[2:])
            else:
                self.exact.add(rule)

    def suffix(self, host: str) -> str:
        labels = host.split(".")
        best = labels[-1]  # implicit "*" rule
        for i in range(len(labels)):
            candidate = ".".join(labels[i:])
            if candidate in self.exception:
                # Exception rules make the candidate itself registrable,
                # so the suffix is everything after its first label.
                return ".".join(labels[i + 1:])
            if candidate in self.exact and len(candidate) > len(best):
                best = candidate
            if i > 0:
                parent = ".".join(labels[i:])
                wild = ".".join(labels[i - 1:])
                if parent in self.wildcard and len(wild) > len(best):
                    best = wild
        return best

    def registrable(self, host: str) -> str:
        if _is_ip(host):
            return host
        suffix = self.suffix(host)
        if host == suffix:
            return host
        extra = host[: -(len(suffix) + 1)].split(".")
        return extra[-1] + "." + suffix if suffix else extra[-1]


def _is_ip(host: str) -> bool:
    try:
        ipaddress.ip_address(host)
        return True
    except ValueError:
        return False


_PSL: Optional[PublicSuffixList] = None


def _psl() -> PublicSuffixList:
    global _PSL
    if _PSL is None:
        text = (
            resources.files("sentinel.data")
            .joinpath("public_suffix_list.txt")
            .read_text(encoding="utf-8")
        )
        _PSL = PublicSuffixList(text.splitlines())
    return _PSL


def url_host(url: str) -> str:
    """Full host of the URL, lowercased, port stripped (subdomains kept)."""
    host = _parse_host(url)
    if host is None:
        raise ValueError(f"unparseable URL: {url!r}")
    return host


def registrable_domain(url_or_host: str) -> str:
    """Registrable domain (public suffix + 1) of a URL or bare host."""
    if "://" in url_or_host:
        host = url_host(url_or_host)
    else:
        host = url_or_host.lower().rstrip(".")
        if not host:
            raise ValueError("empty host")
    return _psl().registrable(host)
