"""Labeling rule tests: WOT boundaries, VirusTotal categories, listings."""

import pytest
from hypothesis import given, strategies as st

from sentinel.blacklist import (
    ProviderClient,
    SnapshotEntry,
    SnapshotError,
    SnapshotStore,
    WotScore,
    attach_verdicts,
    entry_to_verdict,
    label_post,
    label_url,
    load_snapshot,
    lookup_names,
    query_providers,
    snapshot_query,
    virustotal_is_malicious,
    wot_is_malicious,
)
from sentinel.model import Entity, Post, ProviderVerdict, UrlRecord

USER = Entity(entity_id="u1", kind="user", name="Pat Example")
POST = Post(post_id="p1", author=USER, message="x")


def record(*verdicts, domain="site.example"):
    return UrlRecord(
        raw_url=f"http://{domain}/x",
        resolved_url=f"http://{domain}/x",
        domain=domain,
        resolution_status="resolved",
        provider_verdicts=tuple(verdicts),
    )


class TestWotRule:
    @pytest.mark.parametrize(
        "rep,conf,expected",
        [(59, 10, True), (59, 9, False), (60, 10, False), (60, 9, False)],
    )
    def test_numeric_boundary(self, rep, conf, expected):
        scores = [WotScore("trustworthiness", rep, conf)]
        assert wot_is_malicious(scores, "neutral") is expected

    def test_either_component_suffices(self):
        scores = [
            WotScore("trustworthiness", 95, 40),
            WotScore("child_safety", 55, 12),
        ]
        assert wot_is_malicious(scores) is True

    def test_component_conditions_not_mixed_across_components(self):
        # rep<60 on one component, conf>=10 only on the other: no single
        # component satisfies both, so the rule must not fire.
        scores = [
            WotScore("trustworthiness", 55, 3),
            WotScore("child_safety", 90, 80),
        ]
        assert wot_is_malicious(scores) is False

    def test_category_rule_fires_alone(self):
        scores = [WotScore("child_safety", 10, 9)]  # conf below floor
        assert wot_is_malicious(scores, "questionable") is True
        assert wot_is_malicious([], "negative") is True

    def test_benign_groups_do_not_fire(self):
        assert wot_is_malicious([], "neutral") is False
        assert wot_is_malicious([], "positive") is False
        assert wot_is_malicious([], None) is False

    def test_good_reputation_high_confidence(self):
        assert wot_is_malicious([WotScore("trustworthiness", 60, 99)], "neutral") is False

    def test_score_bounds_enforced(self):
        with pytest.raises(ValueError):
            WotScore("trustworthiness", 101, 5)
        with pytest.raises(ValueError):
            WotScore("trustworthiness", 50, -1)
        with pytest.raises(ValueError):
            WotScore("popularity", 50, 50)


class TestVirusTotalRule:
    @pytest.mark.parametrize(
        "categories,expected",
        [
            (["News"], False),
            (["Phishing"], True),
            ([], False),
            (["known SPAM source"], True),
            (["Malicious content"], True),
            (["social networks", "phishing and fraud"], True),
            (["shopping", "sports"], False),
        ],
    )
    def test_substring_match(self, categories, expected):
        assert virustotal_is_malicious(categories) is expected


class TestLabelUrl:
    def test_phishtank_listing_alone(self):
        rec = record(ProviderVerdict(provider="phishtank", listed=True))
        assert label_url(rec) == "malicious"

    def test_surbl_and_gsb_listings(self):
        assert label_url(record(ProviderVerdict(provider="surbl", listed=True))) == "malicious"
        assert label_url(record(ProviderVerdict(provider="gsb", listed=True))) == "malicious"

    def test_unlisted_is_legitimate(self):
        rec = record(ProviderVerdict(provider="surbl", listed=False))
        assert label_url(rec) == "legitimate"

    def test_no_verdicts_default_negative(self):
        assert label_url(record()) == "legitimate"

    def test_wot_component_rule(self):
        rec = record(
            ProviderVerdict(
                provider="wot",
                reputation={"child_safety": 55},
                confidence={"child_safety": 12},
            )
        )
        assert label_url(rec) == "malicious"

    def test_wot_category_group_in_categories(self):
        rec = record(ProviderVerdict(provider="wot", categories=("negative",)))
        assert label_url(rec) == "malicious"

    def test_vt_category_on_other_provider_ignored(self):
        # A listing provider carrying category text must not trip the
        # VirusTotal substring rule.
        rec = record(ProviderVerdict(provider="surbl", categories=("spam",), listed=False))
        assert label_url(rec) == "legitimate"

    def test_virustotal_categories(self):
        rec = record(ProviderVerdict(provider="virustotal", categories=("News",)))
        assert label_url(rec) == "legitimate"
        rec = record(ProviderVerdict(provider="virustotal", categories=("Phishing",)))
        assert label_url(rec) == "malicious"


malicious_verdicts = st.one_of(
    st.just(ProviderVerdict(provider="phishtank", listed=True)),
    st.just(ProviderVerdict(provider="surbl", listed=True)),
    st.just(ProviderVerdict(provider="gsb", listed=True)),
    st.just(ProviderVerdict(provider="virustotal", categories=("spam",))),
    st.just(
        ProviderVerdict(
            provider="wot",
            reputation={"trustworthiness": 10},
            confidence={"trustworthiness": 90},
        )
    ),
)

benign_verdicts = st.one_of(
    st.just(ProviderVerdict(provider="phishtank", listed=False)),
    st.just(ProviderVerdict(provider="virustotal", categories=("News",))),
    st.just(
        ProviderVerdict(
            provider="wot",
            reputation={"trustworthiness": 80},
            confidence={"trustworthiness": 90},
        )
    ),
)

verdict_lists = st.lists(st.one_of(malicious_verdicts, benign_verdicts), max_size=5)


class TestLabelPost:
    @given(st.lists(verdict_lists, max_size=4))
    def test_post_label_is_or_over_url_labels(self, verdict_groups):
        records = [record(*vs) for vs in verdict_groups]
        expected = (
            "malicious"
            if any(label_url(r) == "malicious" for r in records)
            else "legitimate"
        )
        assert label_post(POST, records) == expected

    def test_zero_urls_is_legitimate(self):
        assert label_post(POST, []) == "legitimate"

    def test_one_bad_among_three(self):
        records = [
            record(),
            record(ProviderVerdict(provider="gsb", listed=True)),
            record(),
        ]
        assert label_post(POST, records) == "malicious"

    @given(verdict_lists, st.one_of(malicious_verdicts, benign_verdicts))
    def test_adding_a_verdict_never_clears_malicious(self, verdicts, extra):
        before = label_url(record(*verdicts))
        after = label_url(record(*(list(verdicts) + [extra])))
        if before == "malicious":
            assert after == "malicious"


SNAPSHOT_LINES = "\n".join(
    [
        '{"domain": "evil.example", "provider": "surbl", "listed": true}',
        '{"domain": "evil.example", "provider": "virustotal", "categories": ["Phishing"]}',
        '{"domain": "shady.example", "provider": "wot", "wot_scores": [{"component": "trustworthiness", "reputation": 40, "confidence": 22}], "wot_category_group": "negative"}',
        '{"domain": "fine.example", "provider": "virustotal", "categories": ["News"]}',
    ]
)


class TestSnapshot:
    def test_load_and_query(self, tmp_path):
        path = tmp_path / "snapshot.jsonl"
        path.write_text(SNAPSHOT_LINES + "\n")
        store = load_snapshot(str(path))
        verdicts = query_providers("evil.example", "fixture", store=store)
        assert {v.provider for v in verdicts} == {"surbl", "virustotal"}
        assert query_providers("unknown.example", "fixture", store=store) == []

    def test_wot_entry_verdict_carries_scores_and_group(self, tmp_path):
        path = tmp_path / "snapshot.jsonl"
        path.write_text(SNAPSHOT_LINES + "\n")
        store = load_snapshot(str(path))
        (verdict,) = [entry_to_verdict(e) for e in store.lookup("shady.example")]
        assert verdict.reputation == {"trustworthiness": 40}
        assert "negative" in verdict.categories

    def test_malformed_line_names_line_number(self, tmp_path):
        lines = ['{"domain": "a.example", "provider": "surbl"}'] * 16 + ["{broken"]
        path = tmp_path / "snapshot.jsonl"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SnapshotError, match="line 17"):
            load_snapshot(str(path))

    def test_wot_fields_on_wrong_provider_rejected(self, tmp_path):
        path = tmp_path / "snapshot.jsonl"
        path.write_text('{"domain": "a.example", "provider": "surbl", "wot_category_group": "negative"}\n')
        with pytest.raises(SnapshotError, match="line 1"):
            load_snapshot(str(path))

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "snapshot.jsonl"
        path.write_text('\n{"domain": "a.example", "provider": "surbl", "listed": true}\n\n')
        store = load_snapshot(str(path))
        assert len(store) == 1

    def test_lookup_is_case_insensitive(self):
        store = SnapshotStore([SnapshotEntry(domain="Evil.Example", provider="surbl", listed=True)])
        assert len(store.lookup("evil.example")) == 1


class TestQueryPlumbing:
    def test_lookup_names_host_then_registrable(self):
        rec = record(domain="bad.example")
        rec = UrlRecord(
            raw_url="http://promo.bad.example/x",
            resolved_url="http://promo.bad.example/x",
            domain="bad.example",
            resolution_status="resolved",
        )
        assert lookup_names(rec) == ("promo.bad.example", "bad.example")

    def test_lookup_names_collapse_when_equal(self):
        rec = record(domain="bad.example")
        assert lookup_names(rec) == ("bad.example",)

    def test_hit_on_registrable_domain_counts(self):
        store = SnapshotStore([SnapshotEntry(domain="bad.example", provider="gsb", listed=True)])
        rec = UrlRecord(
            raw_url="http://promo.bad.example/x",
            resolved_url="http://promo.bad.example/x",
            domain="bad.example",
            resolution_status="resolved",
        )
        labeled = attach_verdicts(rec, snapshot_query(store))
        assert label_url(labeled) == "malicious"

    def test_hit_on_full_host_counts(self):
        store = SnapshotStore(
            [SnapshotEntry(domain="promo.bad.example", provider="gsb", listed=True)]
        )
        rec = UrlRecord(
            raw_url="http://promo.bad.example/x",
            resolved_url="http://promo.bad.example/x",
            domain="bad.example",
            resolution_status="resolved",
        )
        labeled = attach_verdicts(rec, snapshot_query(store))
        assert label_url(labeled) == "malicious"

    def test_unavailable_provider_yields_no_verdict(self):
        class FailingClient(ProviderClient):
            provider = "gsb"

            def _fetch(self, domain):
                raise IOError("network down")

        class ListingClient(ProviderClient):
            provider = "surbl"

            def _fetch(self, domain):
                return ProviderVerdict(provider="surbl", listed=True)

        verdicts = query_providers(
            "x.example",
            "live",
            clients=[FailingClient(max_per_second=1000), ListingClient(max_per_second=1000)],
        )
        assert [v.provider for v in verdicts] == ["surbl"]

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            query_providers("x.example", "telepathy")

    def test_fixture_mode_requires_store(self):
        with pytest.raises(ValueError):
            query_providers("x.example", "fixture")
