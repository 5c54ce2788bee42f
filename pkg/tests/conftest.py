import json

import pytest

from emdatgeo import GeoNamesClient, GeoNamesConfig, SimulatedClock, read_emdat, split_locations
from emdatgeo.datasets import california_path, geonames_fixtures_path, sample_path

# Coordinates printed for the first six location words of the sample storm.
REFERENCE_COORDS = {
    "alabama": (34.60739, -86.97977),
    "georgia": (33.69277, -84.39957),
    "louisiana": (30.12595, -92.00939),
    "north carolina": (34.00071, -81.03481),
    "south carolina": (34.00071, -81.03481),
    "tennessee": (35.80000, -86.50000),
}


@pytest.fixture
def sample_records():
    return read_emdat(sample_path())


@pytest.fixture
def sample_pairs(sample_records):
    return split_locations(sample_records)


@pytest.fixture
def fixture_config():
    return GeoNamesConfig(mode="offline-fixtures", fixtures=str(geonames_fixtures_path()))


@pytest.fixture
def fixture_client(fixture_config):
    return GeoNamesClient(fixture_config, clock=SimulatedClock())


@pytest.fixture
def california():
    return california_path()


class FakeResponse:
    def __init__(self, payload, status_code=200):
        self._payload = payload
        self.status_code = status_code

    def json(self):
        if isinstance(self._payload, Exception):
            raise self._payload
        return self._payload


class FakeSession:
    """Stands in for requests.Session; answers every word with a synthetic match."""

    def __init__(self, responder=None):
        self.calls = []
        self.responder = responder or self.default

    @staticmethod
    def default(params):
        word = params.get("q", "")
        h = sum(map(ord, word))
        lat = (h % 1800) / 10 - 90
        lng = (h * 7 % 3600) / 10 - 180
        return FakeResponse({"geonames": [
            {"lat": str(lat), "lng": str(lng), "toponymName": word.title(), "countryCode": params.get("country")}
        ]})

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, dict(params or {})))
        result = self.responder(params)
        if isinstance(result, Exception):
            raise result
        return result


@pytest.fixture
def fake_session():
    return FakeSession()


def write_fixture(directory, word, country, items):
    from emdatgeo.geonames import fixture_filename

    path = directory / fixture_filename(word, country)
    path.write_text(json.dumps({"geonames": items}), encoding="utf-8")
    return path


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, title in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
