import re

import pytest
from hypothesis import given, settings, strategies as st

from emdatgeo import ConfigurationError, DisasterRecord, SplitConfig, default_split_config, split_locations
from emdatgeo.locationizer import DEFAULT_DUMMY_WORDS, DEFAULT_JOINERS, split_location_string


def words(text, **kw):
    return split_location_string(text, **kw)[0]


def rec(location, dis_no="2000-0001-XXX"):
    return DisasterRecord(dis_no=dis_no, country="Somewhere", location_string=location)


def test_first_sample_row(sample_records):
    out = split_locations(sample_records[:1])
    assert len(out) == 10
    assert [r.location_word for r in out[:6]] == [
        "alabama", "georgia", "louisiana", "north carolina", "south carolina", "tennessee"]
    assert not any(r.uncertain_location_specificity for r in out)
    assert out[-1].location_word == "massachussetts"


def test_sample_has_18_pairs(sample_pairs):
    assert len(sample_pairs) == 18
    counts = {}
    for r in sample_pairs:
        counts[r.dis_no] = counts.get(r.dis_no, 0) + 1
    assert counts == {"2000-0919-USA": 10, "1928-0024-CAN": 2, "1998-0212-USA": 6}


def test_parent_fields_carried(sample_pairs):
    quake = [r for r in sample_pairs if r.dis_no == "1928-0024-CAN"]
    assert [r.location_word for r in quake] == ["burin peninsula", "newfoundland"]
    assert all(r.native_latitude == "48.60 N" and r.extras["CPI"] == "6.731507" for r in quake)


def test_and_and_dummy_word():
    assert words("New York, Pennsylvania, and Massachusetts provinces") == [
        "new york", "pennsylvania", "massachusetts"]


def test_absent_location_gives_one_empty_row():
    (row,) = split_locations([rec(None)])
    assert row.location_word == "" and row.uncertain_location_specificity is False


def test_parentheses_flag_all_rows():
    rows = split_locations([rec("Berkeley (California)")])
    assert [(r.location_word, r.uncertain_location_specificity) for r in rows] == [
        ("berkeley", True), ("california", True)]


def test_enumerated_list():
    assert words("(1) A (2) B (3) C") == ["a", "b", "c"]
    assert words("1) Foo 2) Bar 3. Baz") == ["foo", "bar", "baz"]


def test_nested_parentheses_style():
    assert words("A (B and C)") == ["a", "b", "c"]
    assert words("California (Berkeley, Emeryville, Alameda)") == [
        "california", "berkeley", "emeryville", "alameda"]


def test_other_delimiters():
    assert words("Lima; Cusco / Puno & Tacna\nArequipa") == ["lima", "cusco", "puno", "tacna", "arequipa"]


def test_dummy_words_whole_words_only():
    assert words("Statesboro, Townsville") == ["statesboro", "townsville"]
    assert words("Kerala state, Goa") == ["kerala", "goa"]


def test_defaults():
    cfg = default_split_config()
    assert {"provinces", "states", "towns", "state", "province", "town"} <= cfg.dummy_words
    assert words("a, b and c") == ["a", "b", "c"]
    assert words("sandbar, anderson") == ["sandbar", "anderson"]


def test_user_additions_extend_defaults():
    cfg = SplitConfig().extend([r"\s-\s"], ["prefecture"])
    assert set(DEFAULT_JOINERS) <= set(cfg.joiner_patterns)
    assert DEFAULT_DUMMY_WORDS <= cfg.dummy_words
    assert words("Osaka prefecture - Kyoto, Tokyo provinces", config=cfg) == ["osaka", "kyoto", "tokyo"]


def test_replace_defaults():
    cfg = SplitConfig().extend([r"\|"], ["zone"], replace_defaults=True)
    assert cfg.joiner_patterns == (r"\|",)
    assert words("a, b | c zone", config=cfg) == ["a, b", "c"]


def test_bad_pattern_is_configuration_error():
    with pytest.raises(ConfigurationError):
        SplitConfig(joiner_patterns=("(",))
    with pytest.raises(ConfigurationError):
        SplitConfig(joiner_patterns=())


def test_keyword_extensions_on_split_locations():
    rows = split_locations([rec("Osaka prefecture + Kyoto")], joiner_regex=[r"\+"], dummy_words=["prefecture"])
    assert [r.location_word for r in rows] == ["osaka", "kyoto"]


def test_unknown_column_lists_available(sample_records):
    with pytest.raises(ConfigurationError, match="Dis No"):
        split_locations(sample_records, column="Places")


def test_other_column_can_be_split():
    r = DisasterRecord(dis_no="X", extras={"Origin": "Upper Nile, Jonglei"})
    assert [x.location_word for x in split_locations([r], column="Origin")] == ["upper nile", "jonglei"]


def test_single_word_idempotent():
    assert words("tennessee") == ["tennessee"]
    assert words("Tennessee") == ["tennessee"]


def test_misspelling_and_abbreviation_pass_through():
    assert words("Massachussetts, LA") == ["massachussetts", "la"]


def test_dedupe_off_by_default():
    assert [r.location_word for r in split_locations([rec("Lima, Lima")])] == ["lima", "lima"]
    assert [r.location_word for r in split_locations([rec("Lima, Lima")], dedupe=True)] == ["lima"]


# ---------------------------------------------------------------- properties

PLACE = st.from_regex(r"[A-Za-z][A-Za-z'\-]{1,9}( [A-Za-z][a-z]{1,9})?", fullmatch=True)
DUMMY = st.sampled_from(sorted(DEFAULT_DUMMY_WORDS)).map(lambda w: w.title() if len(w) % 2 else w.upper())
SEP = st.sampled_from([", ", ",", "; ", " and ", " AND ", " & ", "/", "\n", " (", ") ", "(1) ", " 2) ", " 3. ", " ", "  "])
PIECE = st.one_of(PLACE, PLACE, DUMMY, SEP)
LOCATION = st.lists(PIECE, min_size=0, max_size=14).map("".join)

COMPILED = [re.compile(p) for p in DEFAULT_JOINERS]


def check_word(word):
    assert word == word.strip() and word
    assert word == word.lower()
    for pattern in COMPILED:
        assert pattern.search(word) is None, (word, pattern.pattern)
    assert word not in DEFAULT_DUMMY_WORDS
    for dummy in DEFAULT_DUMMY_WORDS:
        assert re.search(rf"(?<!\w){dummy}(?!\w)", word) is None


@settings(max_examples=300, deadline=None)
@given(LOCATION)
def test_location_word_invariants(text):
    ws, flag = split_location_string(text)
    for w in ws:
        check_word(w)
    assert flag == ("(" in text or ")" in text)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.none(), LOCATION), min_size=1, max_size=8))
def test_disaster_set_and_flag_preserved(texts):
    records = [rec(t, dis_no=f"2001-{i:04d}-XXX") for i, t in enumerate(texts)]
    out = split_locations(records)
    assert {r.dis_no for r in out} == {r.dis_no for r in records}
    for source in records:
        flags = {r.uncertain_location_specificity for r in out if r.dis_no == source.dis_no}
        assert len(flags) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(DUMMY, min_size=1, max_size=5), st.lists(SEP.filter(lambda s: "(" not in s and ")" not in s), min_size=5, max_size=5))
def test_only_dummy_words_fall_back(dummies, seps):
    text = "".join(d + s for d, s in zip(dummies, seps))
    rows = split_locations([rec(text)])
    assert len(rows) == 1 and rows[0].location_word == ""
