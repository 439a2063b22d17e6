"""Corpus loading and synthetic corpus generation.

Loading accepts Graph-API-shaped exports (one JSON object per line) and the
canonical format this package writes. Generation plants label-conditional
contrasts behind the published rates: page authorship, posting app source,
photo/video share, facebook-domain share, and URL shape. Everything else is
drawn from pools shared by both classes so no accidental signal leaks in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional

import numpy as np

from .blacklist import SnapshotEntry, WotScore
from .model import (
    Entity,
    GENDERS,
    LEGITIMATE,
    MALICIOUS,
    LabelValue,
    POST_TYPES,
    Post,
    dump_json_line,
    post_from_dict,
    post_to_dict,
    read_json_lines,
    validate_post,
)

CORPUS_FORMATS = ("graph_json_lines", "canonical_json_lines")

_SECONDS_54_DAYS = 54 * 86400


class CorpusError(ValueError):
    """Raised when a corpus file yields no usable posts."""


@dataclass(frozen=True)
class Corpus:
    posts: tuple[Post, ...]
    provenance: str  # "file" or "synthetic"
    generator_seed: Optional[int] = None
    # Ground-truth labels (synthetic corpora and labeled canonical files).
    labels: Optional[dict[str, LabelValue]] = None
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.posts)

    def label_of(self, post_id: str) -> Optional[LabelValue]:
        if self.labels is None:
            return None
        return self.labels.get(post_id)


@dataclass(frozen=True)
class SyntheticProfile:
    n_malicious: int = 10_000
    n_legitimate: int = 10_000
    p_page_given_malicious: float = 0.21
    p_page_given_legitimate: float = 0.10
    p_mobile_app_given_legitimate: float = 0.51
    p_mobile_app_given_malicious: float = 0.15
    p_thirdparty_app_given_malicious: float = 0.115
    p_thirdparty_app_given_legitimate: float = 0.014
    p_photo_or_video_given_legitimate: float = 0.50
    p_photo_or_video_given_malicious: float = 0.06
    p_facebook_domain_given_legitimate: float = 0.5317
    seed: int = 20140612

    def validate(self) -> None:
        if self.n_malicious <= 0 or self.n_legitimate <= 0:
            raise ValueError("corpus counts must be positive")
        for name, value in self.__dict__.items():
            if name.startswith("p_") and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be within [0, 1], got {value}")
        if (
            self.p_mobile_app_given_legitimate + self.p_thirdparty_app_given_legitimate > 1.0
            or self.p_mobile_app_given_malicious + self.p_thirdparty_app_given_malicious > 1.0
        ):
            raise ValueError("app-source probabilities exceed 1 within a class")


# ---------------------------------------------------------------------------
# Loading


def _parse_graph_time(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        return int(datetime.strptime(value, "%Y-%m-%dT%H:%M:%S%z").timestamp())
    raise ValueError(f"unsupported created_time: {value!r}")


def _post_from_graph(raw: dict) -> Post:
    author_raw = raw.get("from") or {}
    if "id" not in raw or "id" not in author_raw:
        raise ValueError("missing id")
    category = author_raw.get("category")
    gender = author_raw.get("gender", "unknown")
    if gender not in GENDERS or category is not None:
        gender = "unknown"
    likes = None
    likes_raw = raw.get("likes")
    if isinstance(likes_raw, dict):
        likes = likes_raw.get("summary", {}).get("total_count")
    author = Entity(
        entity_id=str(author_raw["id"]),
        kind="page" if category is not None else "user",
        name=author_raw.get("name", ""),
        username=author_raw.get("username"),
        gender=gender,
        page_category=category,
        likes_count=likes if category is not None else None,
        locale=author_raw.get("locale"),
    )
    post_type = raw.get("type", "status")
    if post_type not in POST_TYPES:
        post_type = "other"
    return Post(
        post_id=str(raw["id"]),
        author=author,
        message=raw.get("message"),
        story=raw.get("story"),
        link=raw.get("link"),
        picture=raw.get("picture"),
        post_type=post_type,
        app_name=(raw.get("application") or {}).get("name"),
        created_time=_parse_graph_time(raw.get("created_time", 0)),
        captured_time=raw.get("captured_time"),
    )


def parse_graph_post(raw: dict) -> Post:
    """One graph-shaped record to a validated Post. ValueError carries the
    first violation so callers can surface parse diagnostics."""
    if not isinstance(raw, dict):
        raise ValueError("body must be a JSON object")
    try:
        post = _post_from_graph(raw)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed post record: {exc}") from None
    violations = validate_post(post)
    if violations:
        raise ValueError(violations[0])
    return post


def load_corpus(path: str, format: str = "graph_json_lines") -> Corpus:
    if format not in CORPUS_FORMATS:
        raise ValueError(f"unknown corpus format: {format!r}")
    posts: list[Post] = []
    labels: dict[str, LabelValue] = {}
    seen: set[str] = set()
    skipped = 0
    for _, raw in read_json_lines(path, malformed="null"):
        try:
            if not isinstance(raw, dict):
                raise ValueError("not an object")
            if format == "graph_json_lines":
                post = _post_from_graph(raw)
            else:
                post = post_from_dict(raw)
            if post.post_id in seen or validate_post(post):
                raise ValueError("invalid or duplicate post")
        except (ValueError, KeyError, TypeError):
            skipped += 1
            continue
        seen.add(post.post_id)
        posts.append(post)
        if format == "canonical_json_lines" and raw.get("label") in (MALICIOUS, LEGITIMATE):
            labels[post.post_id] = raw["label"]
    if not posts:
        raise CorpusError(f"{path}: no well-formed posts")
    return Corpus(
        posts=tuple(posts),
        provenance="file",
        labels=labels or None,
        skipped=skipped,
    )


def save_corpus(corpus: Corpus, path: str) -> int:
    with open(path, "w", encoding="utf-8") as handle:
        for post in corpus.posts:
            label = corpus.label_of(post.post_id)
            handle.write(dump_json_line(post_to_dict(post, label=label)) + "\n")
    return len(corpus.posts)


# ---------------------------------------------------------------------------
# Synthetic generation

_MAL_DOMAINS = (
    "win-cash-now.example",
    "free-gift-cards.example",
    "prizepatrol2014.example",
    "clicknclaim.example",
    "unseen-footage-hd.example",
    "luxurywatchdeals.example",
    "secretadmirer.example",
    "insta-follower-boost.example",
    "shocknews24.example",
    "megadeal-outlet.example",
)

_LEGIT_DOMAINS = (
    "youtube.com",
    "cnn.com",
    "bbc.co.uk",
    "twitter.com",
    "theguardian.com",
    "yahoo.com",
    "dailymail.co.uk",
    "huffingtonpost.com",
    "nytimes.com",
    "instagram.com",
    "t-online.de",
    "ouest-france.fr",
)

# Domains that get explicitly benign snapshot entries, so the labeling path
# sees mixed evidence rather than a bare miss.
_BENIGN_SNAPSHOT_DOMAINS = ("youtube.com", "cnn.com", "bbc.co.uk", "facebook.com")

_MOBILE_APPS = (
    "Facebook for Android",
    "Facebook for iPhone",
    "Facebook for iPad",
    "Facebook for BlackBerry",
)
_BENIGN_THIRDPARTY = ("HootSuite", "Buffer", "dlvr.it", "RSS Graffiti", "IFTTT", "twitterfeed")
_SPAM_THIRDPARTY = (
    "AutoPoster 3000",
    "Insta Likes Free",
    "Profile Viewer Tracker",
    "Gift Card Genie",
    "Mass Inviter Pro",
)

_FIRST_NAMES = (
    "Alex", "Sam", "Priya", "Rahul", "Maria", "Chris", "Fatima", "Wei",
    "Anna", "David", "Nina", "Omar", "Lucia", "Ivan", "Grace", "Tariq",
)
_LAST_NAMES = (
    "Lee", "Kumar", "Garcia", "Smith", "Patel", "Chen", "Khan", "Silva",
    "Novak", "Brown", "Okafor", "Rossi",
)
_PAGE_NAMES = (
    "Daily Buzz", "Viral Clips HQ", "City News Now", "Prize Patrol",
    "Mega FM", "Cricket Fever", "Football Zone", "Hot Deals 24",
    "Trend Watch", "Community Board",
)
_PAGE_CATEGORIES = ("News", "Community", "Entertainment", "Radio Station", "Sports", "Shopping")
_LOCALES = ("en_US", "en_GB", "hi_IN", "en_IN", "fr_FR", "es_ES", "pt_BR", "de_DE")

_MAL_WORDS = (
    "win", "FREE", "cash", "prize", "click", "claim", "now", "exclusive",
    "offer", "limited", "gift", "amazing", "shocking", "unreal", "hurry",
    "instant", "winner", "secret", "proof", "2014",
)
_LEGIT_WORDS = (
    "just", "watched", "the", "match", "great", "day", "with", "friends",
    "news", "update", "reading", "this", "story", "lovely", "weather",
    "team", "won", "today", "happy", "birthday", "wishes", "family",
    "photo", "from", "trip", "morning", "coffee", "good",
)
_MAL_HASHTAGS = ("#win", "#free", "#prize", "#omg", "#viral")
_LEGIT_HASHTAGS = ("#tbt", "#news", "#family")
_MAL_SUBDOMAINS = ("promo", "go", "win", "m", "app", "super-promo", "secure", "login")
_LEGIT_SUBDOMAINS = ("www", "m", "news", "apps")
_MAL_PATHS = ("claim", "go", "win", "offer", "video", "watch", "gift", "now", "free", "vip")
_LEGIT_PATHS = ("story", "photos", "watch", "posts", "article", "events")
_QUERY_KEYS = ("id", "ref", "src", "tok", "cid", "aff", "utm", "sess")
_ALNUM = "abcdefghijklmnopqrstuvwxyz0123456789"

_CREATED_WINDOW = (1_401_580_800, 1_405_814_400)  # six weeks in mid-2014


def _pick(rng: np.random.Generator, pool):
    return pool[int(rng.integers(len(pool)))]


def _weighted(rng: np.random.Generator, table):
    """table: sequence of (value, weight) with weights summing to ~1."""
    x = float(rng.random())
    acc = 0.0
    for value, weight in table:
        acc += weight
        if x < acc:
            return value
    return table[-1][0]


def _token(rng: np.random.Generator, length: int) -> str:
    return "".join(_ALNUM[int(i)] for i in rng.integers(0, len(_ALNUM), size=length))


def _query_string(rng: np.random.Generator, mean_length: float) -> str:
    target = int(rng.geometric(1.0 / mean_length))
    parts: list[str] = []
    while len("&".join(parts)) < target:
        parts.append(f"{_pick(rng, _QUERY_KEYS)}={_token(rng, int(rng.integers(2, 9)))}")
    return "&".join(parts)


def _make_url(rng: np.random.Generator, malicious: bool, profile: SyntheticProfile) -> str:
    if malicious:
        scheme = "https" if rng.random() < 0.15 else "http"
        domain = _pick(rng, _MAL_DOMAINS)
        n_sub = _weighted(rng, ((0, 0.25), (1, 0.35), (2, 0.25), (3, 0.15)))
        subs = [_pick(rng, _MAL_SUBDOMAINS) for _ in range(n_sub)]
        n_path = _weighted(rng, ((1, 0.4), (2, 0.4), (3, 0.2)))
        path = "/" + "/".join(_pick(rng, _MAL_PATHS) for _ in range(n_path))
        query = _query_string(rng, 24.0) if rng.random() < 0.9 else ""
    else:
        scheme = "https" if rng.random() < 0.6 else "http"
        if rng.random() < profile.p_facebook_domain_given_legitimate:
            domain = "facebook.com"
        else:
            domain = _pick(rng, _LEGIT_DOMAINS)
        n_sub = _weighted(rng, ((0, 0.55), (1, 0.40), (2, 0.05)))
        subs = [_pick(rng, _LEGIT_SUBDOMAINS) for _ in range(n_sub)]
        n_path = _weighted(rng, ((1, 0.7), (2, 0.3)))
        path = "/" + "/".join(_pick(rng, _LEGIT_PATHS) for _ in range(n_path))
        query = _query_string(rng, 6.0) if rng.random() < 0.35 else ""
    host = ".".join(subs + [domain])
    url = f"{scheme}://{host}{path}"
    return url + "?" + query if query else url


def _make_author(rng: np.random.Generator, malicious: bool, index: int, profile) -> Entity:
    prefix = "m" if malicious else "l"
    p_page = profile.p_page_given_malicious if malicious else profile.p_page_given_legitimate
    if rng.random() < p_page:
        likes_mu, likes_sigma = (9.0, 2.2) if malicious else (10.5, 1.8)
        return Entity(
            entity_id=f"ent-{prefix}-{index:06d}",
            kind="page",
            name=f"{_pick(rng, _PAGE_NAMES)} {int(rng.integers(1, 999))}",
            page_category=_pick(rng, _PAGE_CATEGORIES),
            likes_count=int(rng.lognormal(likes_mu, likes_sigma)) + 1,
            locale=_pick(rng, _LOCALES),
        )
    # Reported male:female ratios: 1:2.41 malicious, 1:2 legitimate.
    p_male = 1 / 3.41 if malicious else 1 / 3.0
    gender = "male" if rng.random() < p_male else "female"
    name = f"{_pick(rng, _FIRST_NAMES)} {_pick(rng, _LAST_NAMES)}"
    username = None
    if rng.random() < (0.35 if malicious else 0.55):
        username = name.lower().replace(" ", ".") + str(int(rng.integers(1, 9999)))
    return Entity(
        entity_id=f"ent-{prefix}-{index:06d}",
        kind="user",
        name=name,
        username=username,
        gender=gender,
        locale=_pick(rng, _LOCALES),
    )


def _make_message(rng: np.random.Generator, malicious: bool, urls: list[str]) -> str:
    # Both classes draw from both word pools so no single token is a
    # giveaway; only the mixture proportions differ.
    if malicious:
        words = [
            _pick(rng, _MAL_WORDS if rng.random() < 0.65 else _LEGIT_WORDS)
            for _ in range(int(rng.integers(4, 15)))
        ]
        if rng.random() < 0.6:
            words[int(rng.integers(len(words)))] += "!!" if rng.random() < 0.7 else "!!!"
        if rng.random() < 0.5:
            words += [_pick(rng, _MAL_HASHTAGS) for _ in range(int(rng.integers(1, 4)))]
        if rng.random() < 0.15:
            words.append(":)")
    else:
        words = [
            _pick(rng, _LEGIT_WORDS if rng.random() < 0.9 else _MAL_WORDS)
            for _ in range(int(rng.integers(3, 20)))
        ]
        if rng.random() < 0.25:
            words[-1] += "!"
        if rng.random() < 0.04:
            words[int(rng.integers(len(words)))] += "!!"
        if rng.random() < 0.15:
            words[-1] += "?"
        if rng.random() < 0.25:
            words.append(":)" if rng.random() < 0.8 else ":(")
        if rng.random() < 0.15:
            words.append(_pick(rng, _LEGIT_HASHTAGS))
    words += urls
    return " ".join(words)


def _app_name(rng: np.random.Generator, malicious: bool, profile: SyntheticProfile) -> Optional[str]:
    if malicious:
        p_mobile = profile.p_mobile_app_given_malicious
        p_third = profile.p_thirdparty_app_given_malicious
    else:
        p_mobile = profile.p_mobile_app_given_legitimate
        p_third = profile.p_thirdparty_app_given_legitimate
    bucket = _weighted(
        rng, (("mobile", p_mobile), ("third", p_third), ("web", 1.0 - p_mobile - p_third))
    )
    if bucket == "mobile":
        return _pick(rng, _MOBILE_APPS)
    if bucket == "third":
        if malicious:
            pool = _SPAM_THIRDPARTY if rng.random() < 0.8 else _BENIGN_THIRDPARTY
        else:
            pool = _BENIGN_THIRDPARTY if rng.random() < 0.9 else _SPAM_THIRDPARTY
        return _pick(rng, pool)
    return None  # posting through the website leaves no application name


def _post_type(rng: np.random.Generator, malicious: bool, profile: SyntheticProfile) -> str:
    if malicious:
        p_pv = profile.p_photo_or_video_given_malicious
        table = (
            ("photo", p_pv * 2 / 3),
            ("video", p_pv / 3),
            ("link", (1 - p_pv) * 0.64),
            ("status", (1 - p_pv) * 0.36),
        )
    else:
        p_pv = profile.p_photo_or_video_given_legitimate
        table = (
            ("photo", p_pv * 0.7),
            ("video", p_pv * 0.3),
            ("link", (1 - p_pv) * 0.6),
            ("status", (1 - p_pv) * 0.4),
        )
    return _weighted(rng, table)


def _retention_seconds(rng: np.random.Generator, malicious: bool) -> int:
    # Malicious content disappears fast (takedowns, self-deletion); the
    # long tail still reaches weeks.
    if malicious:
        seconds = rng.lognormal(math.log(4.64 * 3600), 2.0)
    else:
        seconds = rng.lognormal(math.log(24 * 3600), 1.5)
    return int(min(max(seconds, 1.0), _SECONDS_54_DAYS))


def _generate_post(
    rng: np.random.Generator, malicious: bool, index: int, profile: SyntheticProfile
) -> Post:
    prefix = "m" if malicious else "l"
    author = _make_author(rng, malicious, index, profile)
    primary = _make_url(rng, malicious, profile)
    has_link = rng.random() < (0.85 if malicious else 0.75)
    message_urls: list[str] = []
    if not has_link:
        message_urls.append(primary)
    elif rng.random() < (0.7 if malicious else 0.25):
        message_urls.append(_make_url(rng, malicious, profile))
    message: Optional[str] = None
    if message_urls or rng.random() < (0.95 if malicious else 0.85):
        message = _make_message(rng, malicious, message_urls)
    story = None
    if rng.random() < (0.08 if malicious else 0.30):
        story = f"{author.name} shared a link."
    post_type = _post_type(rng, malicious, profile)
    picture = None
    if post_type in ("photo", "video") and rng.random() < 0.9:
        picture = f"https://images.example/{_token(rng, 10)}.jpg"
    created = int(rng.integers(*_CREATED_WINDOW))
    return Post(
        post_id=f"syn-{prefix}-{index:06d}",
        author=author,
        message=message,
        story=story,
        link=primary if has_link else None,
        picture=picture,
        post_type=post_type,
        app_name=_app_name(rng, malicious, profile),
        created_time=created,
        captured_time=created + _retention_seconds(rng, malicious),
    )


def generate_synthetic(profile: SyntheticProfile) -> Corpus:
    profile.validate()
    rng = np.random.default_rng(profile.seed)
    posts: list[Post] = []
    labels: dict[str, LabelValue] = {}
    for i in range(profile.n_malicious):
        post = _generate_post(rng, True, i, profile)
        posts.append(post)
        labels[post.post_id] = MALICIOUS
    for i in range(profile.n_legitimate):
        post = _generate_post(rng, False, i, profile)
        posts.append(post)
        labels[post.post_id] = LEGITIMATE
    return Corpus(
        posts=tuple(posts),
        provenance="synthetic",
        generator_seed=profile.seed,
        labels=labels,
    )


def synthetic_snapshot() -> list[SnapshotEntry]:
    """Provider entries matching the generator's domain pools: every
    malicious-pool domain trips at least one labeling rule, spread across
    all five providers; well-known domains get explicitly benign entries."""
    entries: list[SnapshotEntry] = []
    rules = (
        ("surbl_listed",),
        ("gsb_listed",),
        ("phishtank_listed",),
        ("vt_category",),
        ("wot_scores",),
        ("wot_group", "surbl_listed"),
        ("vt_category", "gsb_listed"),
        ("wot_scores", "phishtank_listed"),
        ("wot_group",),
        ("vt_category", "surbl_listed"),
    )
    vt_bad = ("known spam source", "Malicious downloads", "phishing and fraud")
    for domain, rule_set in zip(_MAL_DOMAINS, rules):
        for rule in rule_set:
            if rule == "surbl_listed":
                entries.append(SnapshotEntry(domain=domain, provider="surbl", listed=True))
            elif rule == "gsb_listed":
                entries.append(SnapshotEntry(domain=domain, provider="gsb", listed=True))
            elif rule == "phishtank_listed":
                entries.append(SnapshotEntry(domain=domain, provider="phishtank", listed=True))
            elif rule == "vt_category":
                category = vt_bad[len(entries) % len(vt_bad)]
                entries.append(
                    SnapshotEntry(domain=domain, provider="virustotal", categories=(category,))
                )
            elif rule == "wot_scores":
                entries.append(
                    SnapshotEntry(
                        domain=domain,
                        provider="wot",
                        wot_scores=(WotScore("trustworthiness", 38, 26),),
                        wot_category_group="neutral",
                    )
                )
            elif rule == "wot_group":
                entries.append(
                    SnapshotEntry(
                        domain=domain,
                        provider="wot",
                        wot_scores=(WotScore("trustworthiness", 72, 8),),
                        wot_category_group="questionable",
                    )
                )
    for domain in _BENIGN_SNAPSHOT_DOMAINS:
        entries.append(
            SnapshotEntry(
                domain=domain,
                provider="wot",
                wot_scores=(
                    WotScore("trustworthiness", 92, 70),
                    WotScore("child_safety", 88, 55),
                ),
                wot_category_group="positive",
            )
        )
        entries.append(SnapshotEntry(domain=domain, provider="virustotal", categories=("News",)))
    return entries


def write_snapshot(entries: Iterable[SnapshotEntry], path: str) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for entry in entries:
            record = {
                "domain": entry.domain,
                "provider": entry.provider,
                "listed": entry.listed,
                "categories": list(entry.categories),
            }
            if entry.wot_scores is not None:
                record["wot_scores"] = [
                    {"component": s.component, "reputation": s.reputation, "confidence": s.confidence}
                    for s in entry.wot_scores
                ]
            if entry.wot_category_group is not None:
                record["wot_category_group"] = entry.wot_category_group
            handle.write(dump_json_line(record) + "\n")
            count += 1
    return count
