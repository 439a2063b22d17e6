"""The 42-feature extractor: entity (9), text (18), metadata (8), link (7).

Every feature is available at posting time. Nothing here looks at likes,
comments, shares, or landing-page content, so vectors computed the moment
a post appears are identical to vectors computed later.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional
from urllib.parse import urlsplit

from .model import (
    Entity,
    FeatureVector,
    GENDERS,
    POST_TYPES,
    Post,
    canonical_schema,
)
from .urls import registrable_domain, url_host

# Last vocabulary slot for values unseen in training. Absent values are
# encoded as the empty string and compete for slots like any other value.
OTHER_TOKEN = "(other)"

_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_VOCAB_CAP = 50


@dataclass(frozen=True)
class Lexicons:
    english_words: frozenset[str]
    emoticons_smile: tuple[str, ...] = (":)", ":-)", ":D", "=)", ":]")
    emoticons_frown: tuple[str, ...] = (":(", ":-(", "=(", ":[")

    def __post_init__(self) -> None:
        if set(self.emoticons_smile) & set(self.emoticons_frown):
            raise ValueError("emoticon sets must be disjoint")


def _load_word_list() -> frozenset[str]:
    text = resources.files("sentinel.data").joinpath("english_words.txt").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


_BUNDLED: Optional[Lexicons] = None


def bundled_lexicons() -> Lexicons:
    global _BUNDLED
    if _BUNDLED is None:
        _BUNDLED = Lexicons(english_words=_load_word_list())
    return _BUNDLED


@dataclass(frozen=True)
class EncoderVocabularies:
    app_vocab: tuple[str, ...]
    page_category_vocab: tuple[str, ...]
    locale_vocab: tuple[str, ...]

    def __post_init__(self) -> None:
        for vocab in (self.app_vocab, self.page_category_vocab, self.locale_vocab):
            if not vocab or vocab[-1] != OTHER_TOKEN:
                raise ValueError("vocabulary must end with the other-bucket token")

    @classmethod
    def build(cls, posts: Iterable[Post], cap: int = _VOCAB_CAP) -> "EncoderVocabularies":
        """Collect the cap most frequent values per categorical field from
        training posts. Ties break alphabetically so builds are stable."""
        apps: dict[str, int] = {}
        categories: dict[str, int] = {}
        locales: dict[str, int] = {}
        for post in posts:
            _tally(apps, post.app_name)
            _tally(categories, post.author.page_category)
            _tally(locales, post.author.locale)
        return cls(
            app_vocab=_top_values(apps, cap),
            page_category_vocab=_top_values(categories, cap),
            locale_vocab=_top_values(locales, cap),
        )

    def to_dict(self) -> dict:
        return {
            "app_vocab": list(self.app_vocab),
            "page_category_vocab": list(self.page_category_vocab),
            "locale_vocab": list(self.locale_vocab),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "EncoderVocabularies":
        return cls(
            app_vocab=tuple(raw["app_vocab"]),
            page_category_vocab=tuple(raw["page_category_vocab"]),
            locale_vocab=tuple(raw["locale_vocab"]),
        )


def _tally(counts: dict[str, int], value: Optional[str]) -> None:
    key = value if value is not None else ""
    counts[key] = counts.get(key, 0) + 1


def _top_values(counts: dict[str, int], cap: int) -> tuple[str, ...]:
    # The reserved token never becomes a learned value, so the final slot
    # stays unambiguous even if the literal string shows up in data.
    ranked = sorted(
        (item for item in counts.items() if item[0] != OTHER_TOKEN),
        key=lambda item: (-item[1], item[0]),
    )
    return tuple(value for value, _ in ranked[:cap]) + (OTHER_TOKEN,)


def encode_categorical(vocab: tuple[str, ...], value: Optional[str]) -> int:
    key = value if value is not None else ""
    try:
        index = vocab.index(key)
    except ValueError:
        return len(vocab) - 1
    # A literal other-token in the data still lands in the other bucket.
    return index if index < len(vocab) - 1 else len(vocab) - 1


def primary_url(p: Post, extracted: list[str]) -> Optional[str]:
    """The URL the link features describe: the link field wins, then the
    first URL found in the message."""
    if p.link:
        return p.link
    if extracted:
        return extracted[0]
    return None


def extract_entity_features(e: Entity, vocab: EncoderVocabularies) -> list[float]:
    return [
        1.0 if e.kind == "page" else 0.0,
        float(GENDERS.index(e.gender) if e.gender in GENDERS else GENDERS.index("unknown")),
        float(encode_categorical(vocab.page_category_vocab, e.page_category)),
        1.0 if e.username else 0.0,
        float(len(e.username) if e.username else 0),
        float(len(e.name)),
        float(len(e.name.split())),
        float(encode_categorical(vocab.locale_vocab, e.locale)),
        float(e.likes_count if e.likes_count is not None else 0),
    ]


def _strip_token(token: str) -> str:
    return token.strip(string.punctuation).lower()


def extract_text_features(
    message: Optional[str], extracted_url_count: int, lex: Lexicons
) -> list[float]:
    text = message or ""
    words = text.split()
    word_count = len(words)

    sentences = [s for s in _SENTENCE_SPLIT.split(text) if s.strip()]
    sentence_count = len(sentences)
    sentence_words = sum(len(s.split()) for s in sentences)

    dictionary_words = sum(1 for w in words if _strip_token(w) in lex.english_words)
    hashtags = sum(1 for w in words if w.startswith("#"))
    distinct = len({w.lower() for w in words})

    return [
        1.0 if "!" in text else 0.0,
        1.0 if "?" in text else 0.0,
        1.0 if "!!" in text else 0.0,
        1.0 if "??" in text else 0.0,
        1.0 if any(e in text for e in lex.emoticons_smile) else 0.0,
        1.0 if any(e in text for e in lex.emoticons_frown) else 0.0,
        float(word_count),
        sum(len(w) for w in words) / word_count if word_count else 0.0,
        float(sentence_count),
        sentence_words / sentence_count if sentence_count else 0.0,
        float(dictionary_words),
        float(hashtags),
        hashtags / word_count if word_count else 0.0,
        float(len(text)),
        float(extracted_url_count),
        extracted_url_count / word_count if word_count else 0.0,
        float(sum(1 for c in text if "A" <= c <= "Z")),
        word_count / distinct if word_count else 0.0,
    ]


def _is_facebook_host(url: str) -> bool:
    try:
        host = url_host(url)
    except ValueError:
        return False
    return host == "facebook.com" or host.endswith(".facebook.com")


def extract_metadata_features(
    p: Post, extracted: list[str], vocab: EncoderVocabularies
) -> list[float]:
    candidates = list(extracted)
    if p.link and p.link not in candidates:
        candidates.append(p.link)
    has_facebook = any(_is_facebook_host(u) for u in candidates)
    post_type = p.post_type if p.post_type in POST_TYPES else "other"
    return [
        float(encode_categorical(vocab.app_vocab, p.app_name)),
        1.0 if has_facebook else 0.0,
        1.0 if p.message else 0.0,
        1.0 if p.story else 0.0,
        1.0 if p.link else 0.0,
        1.0 if p.picture else 0.0,
        float(POST_TYPES.index(post_type)),
        float(len(p.link) if p.link else 0),
    ]


def extract_link_features(url: Optional[str]) -> list[float]:
    if url is None:
        return [0.0] * 7
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise ValueError(f"cannot parse URL: {url!r}")
    host = url_host(url)  # raises ValueError on a hostless URL
    path = parts.path
    query = parts.query

    registrable = registrable_domain(host)
    if host == registrable:
        subdomains = 0
    else:
        prefix = host[: -(len(registrable) + 1)]
        subdomains = len([label for label in prefix.split(".") if label])

    return [
        1.0 if scheme == "http" else 0.0,
        1.0 if scheme == "https" else 0.0,
        float(host.count("-")),
        float(len(query.split("&")) if query else 0),
        float(len(query)),
        float(subdomains),
        float(len(path)),
    ]


def extract_all(
    p: Post,
    extracted: list[str],
    vocab: EncoderVocabularies,
    lex: Lexicons,
    flagged: Optional[list[str]] = None,
) -> FeatureVector:
    """Full vector in schema order. A primary URL that fails to parse gets
    an all-zero link block and the post id is appended to flagged."""
    values = extract_entity_features(p.author, vocab)
    values += extract_text_features(p.message, len(extracted), lex)
    values += extract_metadata_features(p, extracted, vocab)
    url = primary_url(p, extracted)
    try:
        values += extract_link_features(url)
    except ValueError:
        values += [0.0] * 7
        if flagged is not None:
            flagged.append(p.post_id)
    assert len(values) == len(canonical_schema())
    return FeatureVector(post_id=p.post_id, values=tuple(values))
