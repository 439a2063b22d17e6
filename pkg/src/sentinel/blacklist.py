"""Provider verdict aggregation and ground-truth labeling.

Five lookup sources feed the label rules: WOT reputation scores, VirusTotal
category strings, and plain listed/not-listed answers from SURBL, Google Safe
Browsing, and PhishTank. A URL is malicious if any single rule fires; a post
is malicious if any of its URLs is.
"""

from __future__ import annotations

import json
import socket
import threading
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

from .model import (
    LEGITIMATE,
    MALICIOUS,
    LabelValue,
    Post,
    Provider,
    ProviderVerdict,
    UrlRecord,
    WOT_COMPONENTS,
)
from .urls import url_host, registrable_domain

WOT_CATEGORY_GROUPS = ("negative", "questionable", "neutral", "positive")

# Providers whose verdict is a bare listed/not-listed bit.
_LISTING_PROVIDERS = frozenset({"surbl", "gsb", "phishtank"})

_VT_BAD_SUBSTRINGS = ("spam", "malicious", "phishing")

_WOT_REPUTATION_CEILING = 60  # malicious needs reputation strictly below
_WOT_CONFIDENCE_FLOOR = 10  # and confidence at or above


class SnapshotError(ValueError):
    """Raised when a provider snapshot file cannot be parsed."""


@dataclass(frozen=True)
class WotScore:
    component: str
    reputation: int
    confidence: int

    def __post_init__(self) -> None:
        if self.component not in WOT_COMPONENTS:
            raise ValueError(f"unknown WOT component: {self.component!r}")
        for field_name in ("reputation", "confidence"):
            value = getattr(self, field_name)
            if not isinstance(value, int) or not 0 <= value <= 100:
                raise ValueError(f"{field_name} must be an integer in [0, 100], got {value!r}")


@dataclass(frozen=True)
class SnapshotEntry:
    domain: str
    provider: Provider
    listed: bool = False
    categories: tuple[str, ...] = ()
    wot_scores: Optional[tuple[WotScore, ...]] = None
    wot_category_group: Optional[str] = None

    def __post_init__(self) -> None:
        if self.provider != "wot" and (self.wot_scores is not None or self.wot_category_group is not None):
            raise ValueError("wot fields are only valid for provider=wot")
        if self.wot_category_group is not None and self.wot_category_group not in WOT_CATEGORY_GROUPS:
            raise ValueError(f"unknown WOT category group: {self.wot_category_group!r}")


def wot_is_malicious(scores: Iterable[WotScore], category_group: Optional[str] = None) -> bool:
    """Either component failing both numeric checks is enough, as is a
    negative or questionable category group on its own."""
    if category_group is not None and category_group.lower() in ("negative", "questionable"):
        return True
    for score in scores:
        if score.reputation < _WOT_REPUTATION_CEILING and score.confidence >= _WOT_CONFIDENCE_FLOOR:
            return True
    return False


def virustotal_is_malicious(categories: Iterable[str]) -> bool:
    for category in categories:
        lowered = category.lower()
        if any(bad in lowered for bad in _VT_BAD_SUBSTRINGS):
            return True
    return False


def _wot_scores_from_verdict(verdict: ProviderVerdict) -> list[WotScore]:
    reputation = verdict.reputation or {}
    confidence = verdict.confidence or {}
    scores = []
    for component, rep in reputation.items():
        if component not in WOT_COMPONENTS:
            continue
        scores.append(WotScore(component, rep, confidence.get(component, 0)))
    return scores


def _wot_group_from_verdict(verdict: ProviderVerdict) -> Optional[str]:
    for category in verdict.categories:
        if category.lower() in WOT_CATEGORY_GROUPS:
            return category.lower()
    return None


def label_url(rec: UrlRecord) -> LabelValue:
    for verdict in rec.provider_verdicts:
        if verdict.provider == "wot":
            if wot_is_malicious(_wot_scores_from_verdict(verdict), _wot_group_from_verdict(verdict)):
                return MALICIOUS
        elif verdict.provider == "virustotal":
            if virustotal_is_malicious(verdict.categories):
                return MALICIOUS
        elif verdict.provider in _LISTING_PROVIDERS:
            if verdict.listed:
                return MALICIOUS
    return LEGITIMATE


def label_post(post: Post, records: Iterable[UrlRecord]) -> LabelValue:
    del post  # the rule depends only on the post's URL records
    for rec in records:
        if label_url(rec) == MALICIOUS:
            return MALICIOUS
    return LEGITIMATE


class SnapshotStore:
    """Immutable domain -> snapshot entries table; safe for concurrent reads."""

    def __init__(self, entries: Iterable[SnapshotEntry]):
        table: dict[str, list[SnapshotEntry]] = {}
        for entry in entries:
            table.setdefault(entry.domain.lower(), []).append(entry)
        self._table: dict[str, tuple[SnapshotEntry, ...]] = {
            domain: tuple(group) for domain, group in table.items()
        }

    def __len__(self) -> int:
        return len(self._table)

    def lookup(self, domain: str) -> tuple[SnapshotEntry, ...]:
        return self._table.get(domain.lower(), ())

    def domains(self) -> tuple[str, ...]:
        return tuple(sorted(self._table))


def _entry_from_dict(raw: dict) -> SnapshotEntry:
    scores = raw.get("wot_scores")
    parsed_scores = None
    if scores is not None:
        parsed_scores = tuple(
            WotScore(s["component"], s["reputation"], s["confidence"]) for s in scores
        )
    return SnapshotEntry(
        domain=raw["domain"],
        provider=raw["provider"],
        listed=bool(raw.get("listed", False)),
        categories=tuple(raw.get("categories", ())),
        wot_scores=parsed_scores,
        wot_category_group=raw.get("wot_category_group"),
    )


def load_snapshot(path: str) -> SnapshotStore:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                raw = json.loads(stripped)
                if not isinstance(raw, dict):
                    raise ValueError("expected a JSON object")
                entry = _entry_from_dict(raw)
            except (ValueError, KeyError, TypeError) as exc:
                raise SnapshotError(f"{path}: line {line_number}: {exc}") from exc
            entries.append(entry)
    return SnapshotStore(entries)


def entry_to_verdict(entry: SnapshotEntry) -> ProviderVerdict:
    reputation = confidence = None
    categories = entry.categories
    if entry.provider == "wot":
        if entry.wot_scores:
            reputation = {s.component: s.reputation for s in entry.wot_scores}
            confidence = {s.component: s.confidence for s in entry.wot_scores}
        # The category group travels in the shared categories tuple so the
        # verdict type stays provider-agnostic.
        if entry.wot_category_group and entry.wot_category_group not in categories:
            categories = categories + (entry.wot_category_group,)
    return ProviderVerdict(
        provider=entry.provider,
        categories=categories,
        reputation=reputation,
        confidence=confidence,
        listed=entry.listed,
    )


class ProviderClient:
    """Base shape for one live provider adapter.

    Subclasses implement _fetch(domain); query() applies the shared
    rate limit and maps network failures to None (no verdict).
    """

    provider: Provider = "wot"

    def __init__(self, max_per_second: float = 1.0):
        if max_per_second <= 0:
            raise ValueError("max_per_second must be positive")
        self._min_interval = 1.0 / max_per_second
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _throttle(self) -> None:
        with self._lock:
            wait = self._last_request + self._min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        raise NotImplementedError

    def query(self, domain: str) -> Optional[ProviderVerdict]:
        self._throttle()
        try:
            return self._fetch(domain)
        except (IOError, OSError):
            return None  # provider unavailable: no verdict, never evidence


class WotClient(ProviderClient):
    provider: Provider = "wot"
    _ENDPOINT = "http://api.mywot.com/0.4/public_link_json2"
    # Component ids in the public API response.
    _COMPONENT_IDS = {"0": "trustworthiness", "4": "child_safety"}

    def __init__(self, api_key: str, max_per_second: float = 1.0):
        super().__init__(max_per_second)
        self._api_key = api_key

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        import requests

        response = requests.get(
            self._ENDPOINT, params={"hosts": domain + "/", "key": self._api_key}, timeout=10
        )
        response.raise_for_status()
        payload = response.json().get(domain, {})
        reputation: dict[str, int] = {}
        confidence: dict[str, int] = {}
        for component_id, name in self._COMPONENT_IDS.items():
            pair = payload.get(component_id)
            if pair:
                reputation[name] = int(pair[0])
                confidence[name] = int(pair[1])
        if not reputation:
            return None
        return ProviderVerdict(provider="wot", reputation=reputation, confidence=confidence)


class VirusTotalClient(ProviderClient):
    provider: Provider = "virustotal"
    _ENDPOINT = "https://www.virustotal.com/vtapi/v2/domain/report"

    def __init__(self, api_key: str, max_per_second: float = 0.25):
        super().__init__(max_per_second)
        self._api_key = api_key

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        import requests

        response = requests.get(
            self._ENDPOINT, params={"domain": domain, "apikey": self._api_key}, timeout=10
        )
        response.raise_for_status()
        payload = response.json()
        categories = [str(c) for c in payload.get("categories", [])]
        if not categories:
            return None
        return ProviderVerdict(provider="virustotal", categories=tuple(categories))


class SafeBrowsingClient(ProviderClient):
    provider: Provider = "gsb"
    _ENDPOINT = "https://safebrowsing.googleapis.com/v4/threatMatches:find"

    def __init__(self, api_key: str, max_per_second: float = 1.0):
        super().__init__(max_per_second)
        self._api_key = api_key

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        import requests

        body = {
            "threatInfo": {
                "threatTypes": ["MALWARE", "SOCIAL_ENGINEERING", "UNWANTED_SOFTWARE"],
                "platformTypes": ["ANY_PLATFORM"],
                "threatEntryTypes": ["URL"],
                "threatEntries": [{"url": f"http://{domain}/"}],
            }
        }
        response = requests.post(
            self._ENDPOINT, params={"key": self._api_key}, json=body, timeout=10
        )
        response.raise_for_status()
        listed = bool(response.json().get("matches"))
        return ProviderVerdict(provider="gsb", listed=listed)


class PhishTankClient(ProviderClient):
    provider: Provider = "phishtank"
    _ENDPOINT = "https://checkurl.phishtank.com/checkurl/"

    def __init__(self, api_key: Optional[str] = None, max_per_second: float = 1.0):
        super().__init__(max_per_second)
        self._api_key = api_key

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        import requests

        data = {"url": f"http://{domain}/", "format": "json"}
        if self._api_key:
            data["app_key"] = self._api_key
        response = requests.post(self._ENDPOINT, data=data, timeout=10)
        response.raise_for_status()
        results = response.json().get("results", {})
        listed = bool(results.get("in_database")) and bool(results.get("valid"))
        return ProviderVerdict(provider="phishtank", listed=listed)


class SurblClient(ProviderClient):
    """SURBL answers through DNS: <domain>.multi.surbl.org resolves iff listed."""

    provider: Provider = "surbl"
    _ZONE = "multi.surbl.org"

    def _fetch(self, domain: str) -> Optional[ProviderVerdict]:
        try:
            socket.gethostbyname(f"{domain}.{self._ZONE}")
            listed = True
        except socket.gaierror:
            listed = False
        return ProviderVerdict(provider="surbl", listed=listed)


QueryFn = Callable[[str], list[ProviderVerdict]]


def query_providers(
    domain: str,
    mode: str = "fixture",
    *,
    store: Optional[SnapshotStore] = None,
    clients: Iterable[ProviderClient] = (),
) -> list[ProviderVerdict]:
    """Answer from the snapshot (fixture mode) or from live adapters.

    Unknown domains and unavailable providers both come back as an empty
    or shortened list; absence of a verdict is never treated as evidence.
    """
    if mode == "fixture":
        if store is None:
            raise ValueError("fixture mode requires a snapshot store")
        return [entry_to_verdict(entry) for entry in store.lookup(domain)]
    if mode == "live":
        verdicts = []
        for client in clients:
            verdict = client.query(domain)
            if verdict is not None:
                verdicts.append(verdict)
        return verdicts
    raise ValueError(f"unknown provider mode: {mode!r}")


def lookup_names(rec: UrlRecord) -> tuple[str, ...]:
    """Names to query for one record: full host first, then the registrable
    domain. A hit on either counts."""
    names: list[str] = []
    target = rec.resolved_url if rec.resolved_url else rec.raw_url
    try:
        host = url_host(target)
    except ValueError:
        host = rec.domain
    if host:
        names.append(host)
    if rec.domain and rec.domain not in names:
        names.append(rec.domain)
    elif host:
        registrable = registrable_domain(host)
        if registrable and registrable not in names:
            names.append(registrable)
    return tuple(names)


def attach_verdicts(rec: UrlRecord, query: QueryFn) -> UrlRecord:
    verdicts: list[ProviderVerdict] = []
    for name in lookup_names(rec):
        verdicts.extend(query(name))
    return replace(rec, provider_verdicts=tuple(verdicts))


def snapshot_query(store: SnapshotStore) -> QueryFn:
    return lambda domain: query_providers(domain, "fixture", store=store)
