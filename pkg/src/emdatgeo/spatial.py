"""Bounding-box and polygon membership on raw latitude/longitude degrees.

Geometry is planar (no projection, no great circles), which is what a
lat/lng box or a GeoJSON outline drawn on a plate carrée map means.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .coverage import coordinate_value
from .errors import ConfigurationError, FormatError, ValidationError
from .records import GeoPoint, append_column, lookup, require_columns

EDGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BoundingBox:
    top_left: GeoPoint
    bottom_right: GeoPoint

    def __post_init__(self):
        if self.top_left.lat < self.bottom_right.lat:
            raise ConfigurationError("top-left latitude must be >= bottom-right latitude")
        if self.top_left.lng > self.bottom_right.lng:
            raise ConfigurationError(
                "top-left longitude must be <= bottom-right longitude (no antimeridian wrap)")

    @classmethod
    def from_corners(cls, top_left_lat, top_left_lng, bottom_right_lat, bottom_right_lng):
        try:
            return cls(GeoPoint(top_left_lat, top_left_lng), GeoPoint(bottom_right_lat, bottom_right_lng))
        except ValidationError as exc:
            raise ConfigurationError(f"invalid box corner: {exc}") from None

    def contains(self, lat: float, lng: float) -> bool:
        return (self.bottom_right.lat <= lat <= self.top_left.lat
                and self.top_left.lng <= lng <= self.bottom_right.lng)

    def as_polygon(self) -> "Polygon":
        tl, br = self.top_left, self.bottom_right
        ring = np.array([[tl.lng, tl.lat], [br.lng, tl.lat], [br.lng, br.lat], [tl.lng, br.lat]])
        return Polygon(ring)


def _as_ring(vertices) -> np.ndarray:
    ring = np.asarray(vertices, dtype=float)
    if ring.ndim != 2 or ring.shape[1] != 2:
        raise ValidationError("a ring must be a sequence of (lng, lat) pairs")
    if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
        ring = ring[:-1]
    if len(np.unique(ring, axis=0)) < 3:
        raise ValidationError("degenerate ring: fewer than 3 distinct vertices")
    return ring


@dataclass(frozen=True, eq=False)
class Polygon:
    """Outer ring plus holes; rings are ``(N, 2)`` arrays of ``(lng, lat)``, implicitly closed."""

    outer: np.ndarray
    holes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "outer", _as_ring(self.outer))
        object.__setattr__(self, "holes", tuple(_as_ring(h) for h in self.holes))

    @property
    def rings(self) -> tuple:
        return (self.outer,) + self.holes


@dataclass(frozen=True, eq=False)
class PolygonSet:
    polygons: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(self.polygons))

    def __len__(self) -> int:
        return len(self.polygons)

    def rings(self):
        for poly in self.polygons:
            yield from poly.rings


def _segment_distance(px, py, x1, y1, x2, y2) -> np.ndarray:
    dx, dy = x2 - x1, y2 - y1
    length2 = dx * dx + dy * dy
    if length2 == 0:
        return np.hypot(px - x1, py - y1)
    t = np.clip(((px - x1) * dx + (py - y1) * dy) / length2, 0.0, 1.0)
    return np.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def contains_points(polys: PolygonSet, lats, lngs, tolerance: float = EDGE_TOLERANCE) -> np.ndarray:
    """Even-odd test of many points against every ring of every polygon.

    Holes and overlapping polygons toggle membership.  Points within
    ``tolerance`` degrees of any edge count as inside.
    """
    if not len(polys):
        raise ConfigurationError("empty polygon set")
    y = np.asarray(lats, dtype=float)
    x = np.asarray(lngs, dtype=float)
    inside = np.zeros(x.shape, dtype=bool)
    on_edge = np.zeros(x.shape, dtype=bool)
    for ring in polys.rings():
        xs, ys = ring[:, 0], ring[:, 1]
        xj, yj = np.roll(xs, 1), np.roll(ys, 1)
        for x1, y1, x2, y2 in zip(xs, ys, xj, yj):
            crosses = (y1 > y) != (y2 > y)
            if crosses.any():
                with np.errstate(divide="ignore", invalid="ignore"):
                    x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                inside ^= crosses & (x < x_at)
            on_edge |= _segment_distance(x, y, x1, y1, x2, y2) <= tolerance
    return inside | on_edge


def point_in_polygon(point: GeoPoint, polys: PolygonSet) -> bool:
    return bool(contains_points(polys, [point.lat], [point.lng])[0])


def _row_coords(rows, lat_column, lng_column):
    lats = np.full(len(rows), np.nan)
    lngs = np.full(len(rows), np.nan)
    for i, row in enumerate(rows):
        lat = coordinate_value(lookup(row, lat_column), "latitude")
        lng = coordinate_value(lookup(row, lng_column), "longitude")
        if lat is not None and lng is not None:
            lats[i], lngs[i] = lat, lng
    return lats, lngs


def located_in_box(records, box: BoundingBox, lat_column: str = "lat", lng_column: str = "lng",
                   column: str = "in_box") -> list:
    """Append a boolean ``in_box`` column; boundaries are inclusive, missing coordinates are False."""
    if not isinstance(box, BoundingBox):
        raise ConfigurationError("box must be a BoundingBox")
    rows = list(records)
    require_columns(rows, lat_column, lng_column)
    lats, lngs = _row_coords(rows, lat_column, lng_column)
    flags = ((lats >= box.bottom_right.lat) & (lats <= box.top_left.lat)
             & (lngs >= box.top_left.lng) & (lngs <= box.bottom_right.lng))
    return [append_column(r, column, bool(f)) for r, f in zip(rows, flags)]


def located_in_shapefile(records, polys: Optional[PolygonSet] = None, region_file=None,
                         lat_column: str = "lat", lng_column: str = "lng",
                         column: str = "in_shape") -> list:
    """Append a boolean ``in_shape`` column from polygons or a region file."""
    if polys is None:
        if region_file is None:
            raise ConfigurationError("pass polygons or a region file")
        polys = load_region(region_file)
    if not len(polys):
        raise ConfigurationError("empty polygon set")
    rows = list(records)
    require_columns(rows, lat_column, lng_column)
    lats, lngs = _row_coords(rows, lat_column, lng_column)
    present = ~np.isnan(lats)
    flags = np.zeros(len(rows), dtype=bool)
    if present.any():
        flags[present] = contains_points(polys, lats[present], lngs[present])
    return [append_column(r, column, bool(f)) for r, f in zip(rows, flags)]


def _polygon_from_coords(coords, where: str) -> Polygon:
    try:
        rings = [_as_ring(ring) for ring in coords]
    except (ValidationError, ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}") from None
    if not rings:
        raise FormatError(f"{where}: polygon without rings")
    return Polygon(rings[0], tuple(rings[1:]))


def _collect(obj, where: str, out: list) -> None:
    if not isinstance(obj, dict) or "type" not in obj:
        raise FormatError(f"{where}: not a GeoJSON object")
    kind = obj["type"]
    if kind == "FeatureCollection":
        for i, feat in enumerate(obj.get("features", [])):
            _collect(feat, f"{where}.features[{i}]", out)
    elif kind == "Feature":
        geom = obj.get("geometry")
        if geom is None:
            raise FormatError(f"{where}.geometry: missing geometry")
        _collect(geom, f"{where}.geometry", out)
    elif kind == "GeometryCollection":
        for i, geom in enumerate(obj.get("geometries", [])):
            _collect(geom, f"{where}.geometries[{i}]", out)
    elif kind == "Polygon":
        out.append(_polygon_from_coords(obj.get("coordinates", []), f"{where}.coordinates"))
    elif kind == "MultiPolygon":
        for i, coords in enumerate(obj.get("coordinates", [])):
            out.append(_polygon_from_coords(coords, f"{where}.coordinates[{i}]"))
    else:
        raise FormatError(f"{where}: unsupported geometry type {kind!r}")


def parse_geojson(obj, where: str = "$") -> PolygonSet:
    out: list = []
    _collect(obj, where, out)
    return PolygonSet(tuple(out))


def _load_shp(path: Path) -> PolygonSet:
    try:
        import shapefile
    except ImportError:  # pragma: no cover - depends on the environment
        raise ConfigurationError(
            "reading .shp needs the optional 'pyshp' package (pip install artifact[shapefile])"
        ) from None
    with shapefile.Reader(str(path)) as reader:
        return parse_geojson(reader.__geo_interface__, where=str(path))


def load_region(path) -> PolygonSet:
    """Polygons from a GeoJSON file (or an ESRI ``.shp`` when pyshp is installed)."""
    path = Path(path)
    if path.suffix.lower() == ".shp":
        return _load_shp(path)
    text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_geojson(obj, where=str(path))


def points_geojson(records, lat_column: str = "lat", lng_column: str = "lng",
                   properties=("Dis No", "location_word")) -> dict:
    """FeatureCollection of located rows, for viewing in an external map tool."""
    rows = list(records)
    lats, lngs = _row_coords(rows, lat_column, lng_column)
    features = []
    for row, lat, lng in zip(rows, lats, lngs):
        if np.isnan(lat):
            continue
        props = {}
        for name in properties:
            try:
                props[name] = lookup(row, name)
            except KeyError:
                pass
        features.append({"type": "Feature", "properties": props,
                         "geometry": {"type": "Point", "coordinates": [float(lng), float(lat)]}})
    return {"type": "FeatureCollection", "features": features}
