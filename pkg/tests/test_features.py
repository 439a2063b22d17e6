"""Feature extractor tests: literal fixtures plus an independent-oracle
cross-check over randomized posts."""

import pytest
from hypothesis import given, settings, strategies as st

import oracle_features as oracle
from sentinel.features import (
    EncoderVocabularies,
    Lexicons,
    OTHER_TOKEN,
    bundled_lexicons,
    encode_categorical,
    extract_all,
    extract_entity_features,
    extract_link_features,
    extract_metadata_features,
    extract_text_features,
    primary_url,
)
from sentinel.model import Entity, Post, canonical_schema
from sentinel.urls import extract_urls

VOCAB = EncoderVocabularies(
    app_vocab=("", "Facebook for Android", "AutoPoster 3000", OTHER_TOKEN),
    page_category_vocab=("", "News", "Radio Station", OTHER_TOKEN),
    locale_vocab=("", "en_US", "en_GB", OTHER_TOKEN),
)
LEX = bundled_lexicons()

USER = Entity(entity_id="u1", kind="user", name="Pat Example")


def post_with(**kwargs):
    base = dict(post_id="p1", author=USER)
    base.update(kwargs)
    return Post(**base)


class TestEntityFeatures:
    def test_user_fixture(self):
        e = Entity(
            entity_id="e1", kind="user", name="Ann Lee", gender="female", locale="en_US"
        )
        values = extract_entity_features(e, VOCAB)
        assert values == [0.0, 1.0, 0.0, 0.0, 0.0, 7.0, 2.0, 1.0, 0.0]

    def test_page_fixture(self):
        e = Entity(
            entity_id="e2",
            kind="page",
            name="Mega FM",
            page_category="Radio Station",
            likes_count=71_000_000,
        )
        values = extract_entity_features(e, VOCAB)
        assert values[0] == 1.0  # is_page
        assert values[1] == 2.0  # gender stays unknown for pages
        assert values[2] == 2.0  # vocabulary id of "Radio Station"
        assert values[8] == 71_000_000.0

    def test_empty_name(self):
        e = Entity(entity_id="e3", kind="user", name="")
        values = extract_entity_features(e, VOCAB)
        assert values[5] == 0.0 and values[6] == 0.0

    def test_username_length(self):
        e = Entity(entity_id="e4", kind="user", name="X", username="xfan2014")
        values = extract_entity_features(e, VOCAB)
        assert values[3] == 1.0 and values[4] == 8.0


class TestTextFeatures:
    def test_promo_fixture(self):
        values = extract_text_features("Wow!! Free cash :) #win #easy http://x.co", 1, LEX)
        assert values == [
            1.0,  # has_bang
            0.0,  # has_qmark
            1.0,  # has_double_bang
            0.0,  # has_double_qmark
            1.0,  # has_smile
            0.0,  # has_frown
            7.0,  # word_count
            5.0,  # avg_word_length (35 chars / 7 words)
            3.0,  # sentence_count (the URL's dot splits a third segment)
            pytest.approx(8 / 3),  # avg_sentence_length
            5.0,  # dictionary words: wow free cash win easy
            2.0,  # hashtag_count
            pytest.approx(2 / 7),
            41.0,  # char_count
            1.0,  # url_count
            pytest.approx(1 / 7),
            2.0,  # uppercase W, F
            1.0,  # words_per_unique_word
        ]

    def test_empty_message_all_zero(self):
        assert extract_text_features(None, 0, LEX) == [0.0] * 18
        assert extract_text_features("", 0, LEX) == [0.0] * 18

    def test_repetition_ratio(self):
        values = extract_text_features("go go go", 0, LEX)
        assert values[6] == 3.0
        assert values[17] == 3.0

    def test_frown_detection(self):
        assert extract_text_features("so sad :(", 0, LEX)[5] == 1.0
        assert extract_text_features("so sad", 0, LEX)[5] == 0.0

    def test_question_marks(self):
        values = extract_text_features("really?? why", 0, LEX)
        assert values[1] == 1.0 and values[3] == 1.0

    def test_url_count_passed_through(self):
        assert extract_text_features("x", 4, LEX)[14] == 4.0


class TestMetadataFeatures:
    def test_facebook_app_link(self):
        p = post_with(link="https://apps.facebook.com/mypagekeeper/")
        values = extract_metadata_features(p, extract_urls(p), VOCAB)
        assert values[1] == 1.0

    def test_lookalike_domain_is_not_facebook(self):
        p = post_with(link="http://notfacebook.com/x")
        values = extract_metadata_features(p, extract_urls(p), VOCAB)
        assert values[1] == 0.0

    def test_bare_post_all_zero_flags(self):
        p = post_with()
        values = extract_metadata_features(p, [], VOCAB)
        assert values == [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]

    def test_unknown_app_takes_other_bucket(self):
        p = post_with(app_name="Foobar Auto Poster")
        values = extract_metadata_features(p, [], VOCAB)
        assert values[0] == float(len(VOCAB.app_vocab) - 1)

    def test_known_app_id(self):
        p = post_with(app_name="Facebook for Android")
        assert extract_metadata_features(p, [], VOCAB)[0] == 1.0

    def test_post_type_and_link_length(self):
        p = post_with(post_type="video", link="http://v.example/watch")
        values = extract_metadata_features(p, extract_urls(p), VOCAB)
        assert values[6] == 3.0
        assert values[7] == float(len("http://v.example/watch"))


class TestLinkFeatures:
    def test_query_fixture(self):
        values = extract_link_features("http://a-b.news.example.com/p/q?x=1&y=22")
        assert values == [1.0, 0.0, 1.0, 2.0, 8.0, 2.0, 4.0]

    def test_bare_https_fixture(self):
        values = extract_link_features("https://example.com/")
        assert values == [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]

    def test_absent_url_all_zero(self):
        assert extract_link_features(None) == [0.0] * 7

    def test_unparseable_url_raises(self):
        with pytest.raises(ValueError):
            extract_link_features("ftp://files.example/x")
        with pytest.raises(ValueError):
            extract_link_features("http://")

    def test_ip_host(self):
        values = extract_link_features("http://192.0.2.7/x")
        assert values[5] == 0.0  # no subdomains on an address literal


class TestPrimaryUrl:
    def test_link_field_wins(self):
        p = post_with(message="http://a.example/1 http://b.example/2", link="http://c.example/3")
        assert primary_url(p, extract_urls(p)) == "http://c.example/3"

    def test_first_message_url_otherwise(self):
        p = post_with(message="http://a.example/1 http://b.example/2")
        assert primary_url(p, extract_urls(p)) == "http://a.example/1"

    def test_none_without_urls(self):
        p = post_with(message="nothing")
        assert primary_url(p, []) is None


class TestExtractAll:
    def test_length_and_determinism(self):
        p = post_with(message="Wow!! http://x.example/a", link="http://x.example/a")
        v1 = extract_all(p, extract_urls(p), VOCAB, LEX)
        v2 = extract_all(p, extract_urls(p), VOCAB, LEX)
        assert len(v1.values) == 42
        assert v1 == v2

    def test_group_slicing_matches_group_extractors(self):
        p = post_with(
            message="Act now!! :) #deal www.promo-site.example/go?a=1",
            link="https://promo-site.example/landing",
            post_type="link",
            app_name="AutoPoster 3000",
        )
        extracted = extract_urls(p)
        full = list(extract_all(p, extracted, VOCAB, LEX).values)
        assert full[0:9] == extract_entity_features(p.author, VOCAB)
        assert full[9:27] == extract_text_features(p.message, len(extracted), LEX)
        assert full[27:35] == extract_metadata_features(p, extracted, VOCAB)
        assert full[35:42] == extract_link_features(primary_url(p, extracted))

    def test_no_urls_zero_link_block(self):
        p = post_with(message="just words")
        values = extract_all(p, [], VOCAB, LEX).values
        assert values[35:42] == (0.0,) * 7
        assert values[9 + 14] == 0.0  # url_count

    def test_bad_primary_url_flags_post(self):
        p = post_with(link="nonsense://///")
        flagged = []
        vector = extract_all(p, [], VOCAB, LEX, flagged=flagged)
        assert flagged == ["p1"]
        assert vector.values[35:42] == (0.0,) * 7


class TestVocabularies:
    def test_build_orders_by_frequency_then_value(self):
        posts = [post_with(post_id=str(i), app_name="B") for i in range(3)]
        posts += [post_with(post_id=f"a{i}", app_name="A") for i in range(3)]
        posts += [post_with(post_id="z", app_name="C")]
        vocab = EncoderVocabularies.build(posts)
        assert vocab.app_vocab[:3] == ("A", "B", "C")
        assert vocab.app_vocab[-1] == OTHER_TOKEN

    def test_absent_values_count_as_empty_string(self):
        posts = [post_with(post_id=str(i)) for i in range(5)]
        vocab = EncoderVocabularies.build(posts)
        assert vocab.app_vocab[0] == ""

    def test_cap_respected(self):
        posts = [post_with(post_id=str(i), app_name=f"app{i:03d}") for i in range(80)]
        vocab = EncoderVocabularies.build(posts, cap=50)
        assert len(vocab.app_vocab) == 51
        assert vocab.app_vocab[-1] == OTHER_TOKEN

    def test_other_token_in_data_still_encodes_to_last_id(self):
        posts = [post_with(post_id=str(i), app_name=OTHER_TOKEN) for i in range(60)]
        vocab = EncoderVocabularies.build(posts, cap=2)
        assert encode_categorical(vocab.app_vocab, OTHER_TOKEN) == len(vocab.app_vocab) - 1

    def test_round_trip(self):
        assert EncoderVocabularies.from_dict(VOCAB.to_dict()) == VOCAB

    def test_must_end_with_other(self):
        with pytest.raises(ValueError):
            EncoderVocabularies(app_vocab=("a",), page_category_vocab=(OTHER_TOKEN,), locale_vocab=(OTHER_TOKEN,))


class TestLexicons:
    def test_bundled_word_list_covers_fixture_words(self):
        for word in ("wow", "free", "cash", "win", "easy"):
            assert word in LEX.english_words

    def test_word_list_is_lowercase(self):
        assert all(w == w.lower() for w in LEX.english_words)

    def test_emoticon_sets_must_be_disjoint(self):
        with pytest.raises(ValueError):
            Lexicons(
                english_words=frozenset(),
                emoticons_smile=(":)",),
                emoticons_frown=(":)",),
            )


class TestFrozenFixtures:
    def test_all_twenty_posts_exact(self, feature_fixtures):
        vocab, records = feature_fixtures
        for rec in records:
            post = rec["post"]
            flagged: list[str] = []
            vector = extract_all(post, extract_urls(post), vocab, LEX, flagged=flagged)
            assert list(vector.values) == rec["expected"], post.post_id
            assert bool(flagged) == rec["flagged"], post.post_id

    def test_extraction_matches_frozen_urls(self, feature_fixtures):
        _, records = feature_fixtures
        for rec in records:
            assert extract_urls(rec["post"]) == rec["extracted_urls"]


# Randomized cross-check against the independent implementation.

_words = st.sampled_from(
    ["Wow", "free", "cash", "now", "GO", "#win", "#easy", ":)", ":(", "??", "!!",
     "click", "here", "the", "a", "unreal", "груз", "δ", "x.y", "...", "#"]
)
_urls = st.sampled_from(
    [
        "http://x.co",
        "https://a-b.news.example.com/p/q?x=1&y=22",
        "http://promo.win-big.example/go?a=1&bb=22&c=333",
        "https://apps.facebook.com/game/",
        "http://192.0.2.7/x?q=1",
        "www.shop.example/deal",
        "http://za.news.yahoo.com/story",
    ]
)
_messages = st.lists(st.one_of(_words, _urls), max_size=12).map(" ".join)

_entities = st.builds(
    Entity,
    entity_id=st.just("e"),
    kind=st.just("user"),
    name=st.sampled_from(["", "Ann Lee", "A B C", "Название", "x" * 30]),
    username=st.none() | st.sampled_from(["u", "longer.username"]),
    gender=st.sampled_from(["male", "female", "unknown"]),
    locale=st.none() | st.sampled_from(["en_US", "en_GB", "fr_FR"]),
)

_posts = st.builds(
    Post,
    post_id=st.just("p"),
    author=_entities,
    message=st.none() | _messages,
    story=st.none() | st.just("shared a link"),
    link=st.none() | _urls,
    picture=st.none() | st.just("https://img.example/p.jpg"),
    post_type=st.sampled_from(["status", "link", "photo", "video", "other"]),
    app_name=st.none() | st.sampled_from(["Facebook for Android", "AutoPoster 3000", "Mystery"]),
)


class TestOracleAgreement:
    @settings(max_examples=300, deadline=None)
    @given(_posts)
    def test_matches_independent_implementation(self, post):
        extracted = extract_urls(post)
        flagged: list[str] = []
        ours = extract_all(post, extracted, VOCAB, LEX, flagged=flagged)
        expected_values, expected_flag = oracle.full_vector(
            post,
            extracted,
            VOCAB.app_vocab,
            VOCAB.page_category_vocab,
            VOCAB.locale_vocab,
        )
        assert list(ours.values) == pytest.approx(expected_values, abs=1e-12)
        assert bool(flagged) == expected_flag

    @settings(max_examples=200, deadline=None)
    @given(_posts)
    def test_counts_nonnegative_and_ratios_bounded(self, post):
        extracted = extract_urls(post)
        values = extract_all(post, extracted, VOCAB, LEX).values
        assert all(v >= 0 for v in values)
        schema = canonical_schema()
        hpw = values[schema.index_of("hashtags_per_word")]
        assert hpw <= 1.0
        if values[schema.index_of("word_count")] == 0:
            for ratio in ("avg_word_length", "hashtags_per_word", "urls_per_word",
                          "words_per_unique_word"):
                assert values[schema.index_of(ratio)] == 0.0
