import json
import os

import pytest

from sentinel.features import EncoderVocabularies
from sentinel.model import post_from_dict

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

# Filled by the acceptance suite; printed after the run so the per-criterion
# verdict lines survive pytest's output capture.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def feature_fixtures():
    """(vocabularies, records) frozen from the independent oracle; each
    record carries a Post, its extracted URLs, the 42 expected values, and
    whether the primary URL fails to parse."""
    with open(os.path.join(FIXTURES_DIR, "feature_fixtures.json"), encoding="utf-8") as f:
        raw = json.load(f)
    vocab = EncoderVocabularies.from_dict(raw["vocabularies"])
    records = [
        {
            "post": post_from_dict(rec["post"]),
            "extracted_urls": rec["extracted_urls"],
            "expected": rec["expected"],
            "flagged": rec["flagged"],
        }
        for rec in raw["records"]
    ]
    return vocab, records
