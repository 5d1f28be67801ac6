import pytest
from hypothesis import settings

from mwpr.corpus import build_index, make_record

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

JOHN_TEXT = ("John had 5 apples, and Mary had 6 oranges. "
             "Find the total number of fruits")
PARAPHRASE_TEXT = "Sam has 3 pens and Tia has 4 pencils; how many items in all"
VARIANT_TEXT = ("John had 5 apples, and Mary had twice as many oranges after "
                "selling 2 of them. Find the total number of fruits")
VARIANT_EQUATION = "x = 5 + (5 * 2 - 2)"


def fixture_records():
    """Three problems: two additions (one bucket) and one multiplication."""
    return [
        make_record("q1", JOHN_TEXT, "x = 5 + 6", source="fixture"),
        make_record("q2", PARAPHRASE_TEXT, "x = 3 + 4", source="fixture"),
        make_record("q3", "Each of the 4 shelves holds 3 heavy books. "
                          "How many books are stored", "x = 4 * 3",
                    source="fixture"),
    ]


@pytest.fixture
def fixture_corpus():
    return build_index(fixture_records())
