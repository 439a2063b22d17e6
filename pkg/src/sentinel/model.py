"""Core domain types: posts, entities, URL records, labels, and the
fixed 42-slot feature schema shared by every other module.

All types are immutable after construction and safe to share across
threads. Canonical serialization is line-delimited JSON with snake_case
field names; timestamps are UTC epoch seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal, Optional

EntityKind = Literal["user", "page"]
Gender = Literal["male", "female", "unknown"]
PostType = Literal["status", "link", "photo", "video", "other"]
Provider = Literal["wot", "virustotal", "surbl", "gsb", "phishtank"]
LabelValue = Literal["malicious", "legitimate"]
ResolutionStatus = Literal["resolved", "unresolved", "invalid"]

POST_TYPES = ("status", "link", "photo", "video", "other")
GENDERS = ("male", "female", "unknown")
PROVIDERS = ("wot", "virustotal", "surbl", "gsb", "phishtank")

MALICIOUS: LabelValue = "malicious"
LEGITIMATE: LabelValue = "legitimate"

# WOT scores exist for exactly these two components.
WOT_COMPONENTS = ("trustworthiness", "child_safety")


@dataclass(frozen=True)
class Entity:
    entity_id: str
    kind: EntityKind
    name: str
    username: Optional[str] = None
    gender: Gender = "unknown"
    page_category: Optional[str] = None
    likes_count: Optional[int] = None
    locale: Optional[str] = None


@dataclass(frozen=True)
class Post:
    post_id: str
    author: Entity
    message: Optional[str] = None
    story: Optional[str] = None
    link: Optional[str] = None
    picture: Optional[str] = None
    post_type: PostType = "status"
    app_name: Optional[str] = None
    created_time: int = 0
    captured_time: Optional[int] = None


@dataclass(frozen=True)
class ProviderVerdict:
    provider: Provider
    categories: tuple[str, ...] = ()
    # Per-component scores, only for provider == "wot".
    reputation: Optional[dict[str, int]] = None
    confidence: Optional[dict[str, int]] = None
    listed: bool = False


@dataclass(frozen=True)
class UrlRecord:
    raw_url: str
    resolved_url: Optional[str]
    domain: str
    resolution_status: ResolutionStatus
    provider_verdicts: tuple[ProviderVerdict, ...] = ()


@dataclass(frozen=True)
class FeatureDef:
    name: str
    group: Literal["entity", "text", "metadata", "link"]
    kind: Literal["numeric", "boolean", "categorical"]
    # For categorical features with a fixed vocabulary (gender, post type).
    # Training-built vocabularies (app, page category, locale) stay None here
    # and live in EncoderVocabularies.
    vocabulary: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[FeatureDef, ...]

    def __len__(self) -> int:
        return len(self.features)

    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def index_of(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise KeyError(name)

    def group_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for f in self.features:
            counts[f.group] = counts.get(f.group, 0) + 1
        return counts

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "name": f.name,
                    "group": f.group,
                    "kind": f.kind,
                    "vocabulary": list(f.vocabulary) if f.vocabulary else None,
                }
                for f in self.features
            ],
            sort_keys=True,
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class FeatureVector:
    post_id: str
    values: tuple[float, ...]
    label: Optional[LabelValue] = None


_SCHEMA_LAYOUT = (
    # entity (9)
    ("is_page", "entity", "boolean", None),
    ("gender", "entity", "categorical", GENDERS),
    ("page_category", "entity", "categorical", None),
    ("has_username", "entity", "boolean", None),
    ("username_length", "entity", "numeric", None),
    ("name_length", "entity", "numeric", None),
    ("name_word_count", "entity", "numeric", None),
    ("locale", "entity", "categorical", None),
    ("page_likes", "entity", "numeric", None),
    # text (18)
    ("has_bang", "text", "boolean", None),
    ("has_qmark", "text", "boolean", None),
    ("has_double_bang", "text", "boolean", None),
    ("has_double_qmark", "text", "boolean", None),
    ("has_smile", "text", "boolean", None),
    ("has_frown", "text", "boolean", None),
    ("word_count", "text", "numeric", None),
    ("avg_word_length", "text", "numeric", None),
    ("sentence_count", "text", "numeric", None),
    ("avg_sentence_length", "text", "numeric", None),
    ("dictionary_word_count", "text", "numeric", None),
    ("hashtag_count", "text", "numeric", None),
    ("hashtags_per_word", "text", "numeric", None),
    ("char_count", "text", "numeric", None),
    ("url_count", "text", "numeric", None),
    ("urls_per_word", "text", "numeric", None),
    ("uppercase_char_count", "text", "numeric", None),
    ("words_per_unique_word", "text", "numeric", None),
    # metadata (8)
    ("app", "metadata", "categorical", None),
    ("has_facebook_url", "metadata", "boolean", None),
    ("has_message", "metadata", "boolean", None),
    ("has_story", "metadata", "boolean", None),
    ("has_link", "metadata", "boolean", None),
    ("has_picture", "metadata", "boolean", None),
    ("post_type", "metadata", "categorical", POST_TYPES),
    ("link_length", "metadata", "numeric", None),
    # link (7)
    ("has_http", "link", "boolean", None),
    ("has_https", "link", "boolean", None),
    ("hyphen_count", "link", "numeric", None),
    ("param_count", "link", "numeric", None),
    ("param_length", "link", "numeric", None),
    ("subdomain_count", "link", "numeric", None),
    ("path_length", "link", "numeric", None),
)

_CANONICAL = FeatureSchema(
    features=tuple(FeatureDef(n, g, k, v) for n, g, k, v in _SCHEMA_LAYOUT)
)


def canonical_schema() -> FeatureSchema:
    """The fixed 42-feature schema (entity 9, text 18, metadata 8, link 7)."""
    return _CANONICAL


def schema_from_json(text: str) -> FeatureSchema:
    """Inverse of FeatureSchema.to_json."""
    return FeatureSchema(
        features=tuple(
            FeatureDef(
                name=d["name"],
                group=d["group"],
                kind=d["kind"],
                vocabulary=tuple(d["vocabulary"]) if d.get("vocabulary") else None,
            )
            for d in json.loads(text)
        )
    )


def validate_post(p: Post) -> list[str]:
    """Check Post/Entity invariants; returns one description per violation."""
    violations: list[str] = []
    e = p.author
    if not p.post_id:
        violations.append("post_id must be non-empty")
    if e.kind == "page" and e.page_category is None:
        violations.append("pages must carry a page_category")
    if e.kind == "user" and e.page_category is not None:
        violations.append("page_category is only valid for pages")
    if e.kind != "page" and e.likes_count is not None:
        violations.append("likes_count is only valid for pages")
    if e.kind == "page" and e.gender != "unknown":
        violations.append("gender must be unknown for pages")
    if e.likes_count is not None and e.likes_count < 0:
        violations.append("likes_count must be non-negative")
    if p.post_type not in POST_TYPES:
        violations.append(f"unknown post_type {p.post_type!r}")
    if p.captured_time is not None and p.captured_time < p.created_time:
        violations.append(
            "captured_time "
            f"({p.captured_time}) is earlier than created_time ({p.created_time})"
        )
    return violations


# ---------------------------------------------------------------------------
# Canonical line-delimited JSON serialization.


def entity_to_dict(e: Entity) -> dict[str, Any]:
    return {
        "entity_id": e.entity_id,
        "kind": e.kind,
        "name": e.name,
        "username": e.username,
        "gender": e.gender,
        "page_category": e.page_category,
        "likes_count": e.likes_count,
        "locale": e.locale,
    }


def entity_from_dict(d: dict[str, Any]) -> Entity:
    return Entity(
        entity_id=str(d["entity_id"]),
        kind=d["kind"],
        name=d.get("name") or "",
        username=d.get("username"),
        gender=d.get("gender") or "unknown",
        page_category=d.get("page_category"),
        likes_count=d.get("likes_count"),
        locale=d.get("locale"),
    )


def post_to_dict(p: Post, label: Optional[LabelValue] = None) -> dict[str, Any]:
    d: dict[str, Any] = {
        "post_id": p.post_id,
        "author": entity_to_dict(p.author),
        "message": p.message,
        "story": p.story,
        "link": p.link,
        "picture": p.picture,
        "post_type": p.post_type,
        "app_name": p.app_name,
        "created_time": p.created_time,
        "captured_time": p.captured_time,
    }
    if label is not None:
        d["label"] = label
    return d


def post_from_dict(d: dict[str, Any]) -> Post:
    return Post(
        post_id=str(d["post_id"]),
        author=entity_from_dict(d["author"]),
        message=d.get("message"),
        story=d.get("story"),
        link=d.get("link"),
        picture=d.get("picture"),
        post_type=d.get("post_type") or "other",
        app_name=d.get("app_name"),
        created_time=int(d.get("created_time") or 0),
        captured_time=d.get("captured_time"),
    )


def vector_to_dict(v: FeatureVector) -> dict[str, Any]:
    return {"post_id": v.post_id, "values": list(v.values), "label": v.label}


def vector_from_dict(d: dict[str, Any]) -> FeatureVector:
    return FeatureVector(
        post_id=str(d["post_id"]),
        values=tuple(float(x) for x in d["values"]),
        label=d.get("label"),
    )


def dump_json_line(d: dict[str, Any]) -> str:
    """Canonical one-record line: sorted keys, compact separators."""
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def write_json_lines(path: str, records: Iterable[dict[str, Any]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dump_json_line(rec))
            fh.write("\n")
            n += 1
    return n


def read_json_lines(
    path: str, *, malformed: str = "raise"
) -> Iterable[tuple[int, Optional[dict[str, Any]]]]:
    """Yield (line_number, record) pairs, skipping blank lines.

    malformed="raise" propagates decode errors; "null" yields (line, None)
    instead so callers can count and skip junk lines.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield i, json.loads(line)
            except json.JSONDecodeError:
                if malformed == "null":
                    yield i, None
                else:
                    raise
