"""Row types flowing between the pipeline stages.

Each stage widens the row: a :class:`DisasterRecord` (one EM-DAT row) becomes
one or more :class:`LocationizedRecord` (one per disaster-location pair),
which geocoding turns into :class:`GeocodedRecord`.  All of them expose the
same column-oriented view (:meth:`DisasterRecord.get`, :meth:`DisasterRecord.row`)
so coverage and spatial functions can address columns by name, exactly as
they appear in the CSV files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping, Optional

from .errors import ConfigurationError, ValidationError

_NORMALIZE_RE = re.compile(r"[\s._\-]+")


def normalize_column(name: str) -> str:
    """``Dis.No``, ``Dis No`` and ``dis_no`` all normalize to ``disno``."""
    return _NORMALIZE_RE.sub("", str(name)).lower()


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lng: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or not (-180.0 <= self.lng <= 180.0):
            raise ValidationError(f"coordinate out of range: lat={self.lat}, lng={self.lng}")


@dataclass(frozen=True)
class GeocodeMatch:
    """One candidate returned by the toponym search, ``rank`` is 1-based."""

    point: GeoPoint
    toponym_name: str = ""
    country_code: Optional[str] = None
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(f"match rank must be >= 1, got {self.rank}")

    def to_json(self) -> dict:
        return {
            "lat": self.point.lat,
            "lng": self.point.lng,
            "toponymName": self.toponym_name,
            "countryCode": self.country_code,
            "rank": self.rank,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any], rank: Optional[int] = None) -> "GeocodeMatch":
        return cls(
            point=GeoPoint(float(obj["lat"]), float(obj["lng"])),
            toponym_name=obj.get("toponymName") or obj.get("name") or "",
            country_code=obj.get("countryCode") or None,
            rank=int(rank if rank is not None else obj.get("rank", 1)),
        )


# (attribute, CSV header, accepted normalized aliases)
_CORE = (
    ("dis_no", "Dis No", ("disno",)),
    ("country", "Country", ("country",)),
    ("disaster_type", "Disaster Type", ("disastertype",)),
    ("location_string", "Location", ("location", "locationstring")),
    ("native_latitude", "Latitude", ("latitude", "nativelatitude")),
    ("native_longitude", "Longitude", ("longitude", "nativelongitude")),
)
_LOCATIONIZED = (
    ("location_word", "location_word", ("locationword",)),
    ("uncertain_location_specificity", "uncertain_location_specificity",
     ("uncertainlocationspecificity",)),
)
_GEOCODED = (
    ("lat", "lat", ("lat",)),
    ("lng", "lng", ("lng",)),
)

CORE_HEADERS = tuple(header for _, header, _ in _CORE)


def core_attribute(column: str) -> Optional[str]:
    """Map an EM-DAT export header onto a :class:`DisasterRecord` attribute."""
    norm = normalize_column(column)
    for attr, _, aliases in _CORE:
        if norm in aliases:
            return attr
    return None


@dataclass(frozen=True)
class DisasterRecord:
    """One EM-DAT row.

    ``extras`` keeps every other export column, in source order.  ``derived``
    holds columns appended by analysis steps (``in_box``, ``in_shape``) so
    they serialize after the geocoding columns.
    """

    dis_no: str
    country: str = ""
    disaster_type: str = ""
    location_string: Optional[str] = None
    native_latitude: Optional[str] = None
    native_longitude: Optional[str] = None
    extras: Mapping[str, Any] = field(default_factory=dict)
    derived: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.dis_no or not str(self.dis_no).strip():
            raise ValidationError("dis_no must be non-empty")

    def _typed_columns(self):
        return _CORE

    def _tail_columns(self):
        return ()

    def row(self) -> dict:
        """Ordered ``header -> value`` view used for CSV output."""
        out = {header: getattr(self, attr) for attr, header, _ in self._typed_columns()}
        for key, value in self.extras.items():
            out.setdefault(key, value)
        for key, value in self._tail_columns():
            out[key] = value
        for key, value in self.derived.items():
            out[key] = value
        return out

    def columns(self) -> list:
        return list(self.row())

    def get(self, column: str) -> Any:
        """Value of ``column``; typed fields match case/dot/space-insensitively."""
        norm = normalize_column(column)
        for attr, _, aliases in self._typed_columns():
            if norm in aliases:
                return getattr(self, attr)
        for mapping in (self.derived, self.extras):
            if column in mapping:
                return mapping[column]
        for mapping in (self.derived, self.extras):
            for key, value in mapping.items():
                if normalize_column(key) == norm:
                    return value
        for key, value in self._tail_columns():
            if normalize_column(key) == norm:
                return value
        raise KeyError(column)

    def has_column(self, column: str) -> bool:
        try:
            self.get(column)
        except KeyError:
            return False
        return True

    def with_column(self, name: str, value: Any):
        """Copy of this record with one derived column appended (or replaced)."""
        derived = dict(self.derived)
        derived[name] = value
        return replace(self, derived=derived)


@dataclass(frozen=True)
class LocationizedRecord(DisasterRecord):
    location_word: str = ""
    uncertain_location_specificity: bool = False

    def _typed_columns(self):
        return _CORE + _LOCATIONIZED

    def row(self) -> dict:
        out = {header: getattr(self, attr) for attr, header, _ in _CORE}
        for key, value in self.extras.items():
            out.setdefault(key, value)
        for attr, header, _ in _LOCATIONIZED:
            out[header] = getattr(self, attr)
        for key, value in self._tail_columns():
            out[key] = value
        for key, value in self.derived.items():
            out[key] = value
        return out


@dataclass(frozen=True)
class GeocodedRecord(LocationizedRecord):
    """Locationized row plus its ordered candidate matches.

    ``lat``/``lng`` are the rank-1 match and are absent when there is none.
    """

    matches: tuple = ()

    @property
    def point(self) -> Optional[GeoPoint]:
        return self.matches[0].point if self.matches else None

    @property
    def lat(self) -> Optional[float]:
        return self.matches[0].point.lat if self.matches else None

    @property
    def lng(self) -> Optional[float]:
        return self.matches[0].point.lng if self.matches else None

    def _typed_columns(self):
        return _CORE + _LOCATIONIZED + _GEOCODED

    def _tail_columns(self):
        return (
            ("lat", self.lat),
            ("lng", self.lng),
            ("matches", [m.to_json() for m in self.matches]),
        )

    def unwrapped_row(self, n_results: int) -> dict:
        """Flat row with ``lat1``, ``lng1``, ... ``latN``, ``lngN`` columns."""
        out = {k: v for k, v in self.row().items() if k not in ("lat", "lng", "matches")}
        derived = {k: out.pop(k) for k in self.derived}
        for i in range(n_results):
            match = self.matches[i] if i < len(self.matches) else None
            out[f"lat{i + 1}"] = match.point.lat if match else None
            out[f"lng{i + 1}"] = match.point.lng if match else None
        out.update(derived)
        return out


def lookup(row: Any, column: str) -> Any:
    """Column value from a record or a plain mapping row (unwrapped output)."""
    if isinstance(row, DisasterRecord):
        return row.get(column)
    if column in row:
        return row[column]
    norm = normalize_column(column)
    for key, value in row.items():
        if normalize_column(key) == norm:
            return value
    raise KeyError(column)


def require_columns(rows, *columns: str) -> None:
    """Raise :class:`ConfigurationError` if the first row lacks any column."""
    if not rows:
        return
    first = rows[0]
    for column in columns:
        try:
            lookup(first, column)
        except KeyError:
            available = first.columns() if isinstance(first, DisasterRecord) else list(first)
            raise ConfigurationError(
                f"unknown column {column!r}; available columns: {', '.join(map(str, available))}"
            ) from None


def append_column(row: Any, name: str, value: Any) -> Any:
    if isinstance(row, DisasterRecord):
        return row.with_column(name, value)
    out = dict(row)
    out[name] = value
    return out


def record_fields(record: DisasterRecord) -> dict:
    """Dataclass fields as a plain dict (used for equality checks in tests)."""
    return {f.name: getattr(record, f.name) for f in fields(record)}
