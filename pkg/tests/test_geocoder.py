import pytest
from hypothesis import given, settings, strategies as st

from conftest import REFERENCE_COORDS, FakeResponse, FakeSession, write_fixture
from emdatgeo import (
    BatchPlan,
    ConfigurationError,
    GeoNamesClient,
    GeoNamesConfig,
    LocationizedRecord,
    QuotaExhaustedError,
    SimulatedClock,
    country_to_iso2,
    geocode,
    geocode_batches,
)
from emdatgeo.records import GeocodedRecord
from emdatgeo.tables import read_table, to_csv_text, write_csv


def pair(word, country="United States of America (the)", dis_no="2000-0001-USA"):
    return LocationizedRecord(dis_no=dis_no, country=country, location_word=word)


@pytest.mark.parametrize("name,code", [
    ("United States of America (the)", "US"),
    ("Canada", "CA"),
    ("canada", "CA"),
    ("Atlantis", None),
    ("", None),
    (None, None),
    ("Korea (the Republic of)", "KR"),
    ("Bolivia (Plurinational State of)", "BO"),
    ("Congo (the Democratic Republic of the)", "CD"),
    ("Philippines (the)", "PH"),
])
def test_country_to_iso2(name, code):
    assert country_to_iso2(name) == code


def test_reference_coordinates(sample_pairs, fixture_client):
    out = geocode(sample_pairs, client=fixture_client)
    got = {r.location_word: (r.lat, r.lng) for r in out if r.dis_no == "2000-0919-USA"}
    for word, coords in REFERENCE_COORDS.items():
        assert got[word] == coords
    assert got["north carolina"] == got["south carolina"]


def test_rows_preserved_in_order(sample_pairs, fixture_client):
    out = geocode(sample_pairs, client=fixture_client)
    assert [(r.dis_no, r.location_word) for r in out] == [(r.dis_no, r.location_word) for r in sample_pairs]
    unwrapped = geocode(sample_pairs, unwrap=True, client=fixture_client)
    assert len(unwrapped) == len(sample_pairs)


def test_lat_lng_invariant(sample_pairs, fixture_client):
    for r in geocode(sample_pairs, client=fixture_client):
        assert (r.lat is None) == (not r.matches)
        if r.matches:
            assert (r.lat, r.lng) == (r.matches[0].point.lat, r.matches[0].point.lng)


def test_empty_word_passes_through(fixture_client):
    (r,) = geocode([pair("")], client=fixture_client)
    assert r.lat is None and r.lng is None and r.matches == ()


def test_country_bias_used_and_disabled(fake_session):
    client = GeoNamesClient(GeoNamesConfig(username="u"), session=fake_session, clock=SimulatedClock())
    geocode([pair("lima", "Peru")], client=client)
    geocode([pair("cusco", "Peru")], client=client, country_bias=False)
    assert fake_session.calls[0][1]["country"] == "PE"
    assert "country" not in fake_session.calls[1][1]


def test_unwrapped_two_results(tmp_path):
    write_fixture(tmp_path, "springfield", "US", [
        {"lat": "39.80172", "lng": "-89.64371", "toponymName": "Springfield"},
        {"lat": "37.21533", "lng": "-93.29824", "toponymName": "Springfield"},
        {"lat": "42.10148", "lng": "-72.58981", "toponymName": "Springfield"},
    ])
    write_fixture(tmp_path, "salem", "US", [{"lat": "44.9429", "lng": "-123.0351", "toponymName": "Salem"}])
    cfg = GeoNamesConfig(mode="offline-fixtures", fixtures=str(tmp_path))
    rows = geocode([pair("springfield"), pair("salem"), pair("")], n_results=2, unwrap=True, config=cfg)
    assert rows[0]["lat1"] == 39.80172 and rows[0]["lng1"] == -89.64371
    assert rows[0]["lat2"] == 37.21533 and rows[0]["lng2"] == -93.29824
    assert rows[1]["lat2"] is None and rows[1]["lng2"] is None
    assert rows[2]["lat1"] is None
    assert "lat" not in rows[0] and "lat3" not in rows[0]
    header = to_csv_text(rows).splitlines()[0].split(",")
    assert header[-4:] == ["lat1", "lng1", "lat2", "lng2"]


def test_unwrap_consistent_with_nested(sample_pairs, fixture_config):
    nested = geocode(sample_pairs, n_results=2, config=fixture_config)
    flat = geocode(sample_pairs, n_results=2, unwrap=True, config=fixture_config)
    for n, f in zip(nested, flat):
        assert (n.lat, n.lng) == (f["lat1"], f["lng1"])


def test_nested_csv_round_trip(sample_pairs, fixture_client, tmp_path):
    out = geocode(sample_pairs, client=fixture_client)
    path = tmp_path / "geo.csv"
    write_csv(out, path)
    back = read_table(path)
    assert all(isinstance(r, GeocodedRecord) for r in back)
    assert [(r.lat, r.lng, r.matches) for r in back] == [(r.lat, r.lng, r.matches) for r in out]
    header = path.read_text().splitlines()[0].split(",")
    assert "lat" in header and "lng" in header and "matches" in header


def test_workers_keep_order(sample_pairs, fixture_config):
    serial = geocode(sample_pairs, config=fixture_config)
    parallel = geocode(sample_pairs, config=fixture_config, workers=4)
    assert parallel == serial


def test_bias_stability(fake_session):
    client = GeoNamesClient(GeoNamesConfig(username="u"), session=fake_session, clock=SimulatedClock())
    rows = geocode([pair("lima", "Peru"), pair("LIMA", "Peru"), pair("lima", "Peru", "X")], client=client)
    assert rows[0].matches == rows[1].matches == rows[2].matches
    assert len(fake_session.calls) == 1


def test_quota_error_carries_resume_index():
    calls = []

    def answer(params):
        calls.append(params)
        if len(calls) > 3:
            return FakeResponse({"status": {"message": "hourly limit exceeded", "value": 19}})
        return FakeSession.default(params)

    client = GeoNamesClient(GeoNamesConfig(username="u"), session=FakeSession(answer), clock=SimulatedClock())
    records = [pair(w) for w in ["a1", "a2", "a3", "a4", "a5"]]
    with pytest.raises(QuotaExhaustedError) as info:
        geocode_batches(records, BatchPlan(2, 10), client=client)
    assert info.value.resume_index == 3
    assert [r.location_word for r in info.value.completed] == ["a1", "a2", "a3"]
    assert "resume from row index 3" in str(info.value)


def test_batch_plan_defaults_and_validation():
    plan = BatchPlan()
    assert (plan.batch_size, plan.wait_time) == (990, 4800.0)
    assert plan.batch_size <= GeoNamesConfig(username="u").hourly_budget
    with pytest.raises(ConfigurationError):
        BatchPlan(0, 1)
    with pytest.raises(ConfigurationError):
        BatchPlan(1, -1)
    with pytest.raises(ConfigurationError):
        geocode([], n_results=0, config=GeoNamesConfig(username="u"))


def test_single_batch_no_sleep(sample_pairs, fixture_config):
    clock = SimulatedClock()
    client = GeoNamesClient(fixture_config, clock=clock)
    geocode_batches(sample_pairs, BatchPlan(990, 4800), client=client)
    assert clock.sleeps == []


def test_2000_rows_three_batches(fake_session):
    clock = SimulatedClock()
    client = GeoNamesClient(GeoNamesConfig(username="u"), session=fake_session, clock=clock)
    records = [pair(f"place{i}") for i in range(2000)]
    out = geocode_batches(records, BatchPlan(990, 4800), client=client)
    assert len(out) == 2000
    assert clock.sleeps == [4800, 4800]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 25))
def test_batch_equivalence_any_size(batch_size):
    from emdatgeo import read_emdat, split_locations
    from emdatgeo.datasets import geonames_fixtures_path, sample_path

    pairs = split_locations(read_emdat(sample_path()))
    cfg = GeoNamesConfig(mode="offline-fixtures", fixtures=str(geonames_fixtures_path()))
    expected = geocode(pairs, config=cfg)
    got = geocode_batches(pairs, BatchPlan(batch_size, 60), client=GeoNamesClient(cfg, clock=SimulatedClock()))
    assert got == expected
