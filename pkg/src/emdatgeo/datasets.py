"""Paths to the small datasets shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def _path(name: str) -> Path:
    return Path(str(resources.files("emdatgeo").joinpath("data", name)))


def sample_path() -> Path:
    """Three EM-DAT rows (storm, earthquake, heat wave) used throughout the docs."""
    return _path("emdat_sample.csv")


def geonames_fixtures_path() -> Path:
    """Recorded GeoNames responses for every location word of the sample."""
    return _path("geonames_fixtures")


def california_path() -> Path:
    return _path("california.geojson")
