"""How much of a table carries usable coordinates.

Counts are exact; percentages are :class:`fractions.Fraction` and are only
rounded when a report is rendered, so "16 out of 18" always renders as
88.89 rather than drifting.
"""

from __future__ import annotations

import json
import logging
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import ConfigurationError, EmdatGeoError
from .ingest import parse_native_coordinate
from .records import lookup, require_columns

logger = logging.getLogger(__name__)


class AggregationError(EmdatGeoError):
    """A custom per-disaster predicate raised."""

    kind = "validation"


@dataclass(frozen=True)
class DisasterAggregation:
    """Reduces one disaster's per-location located flags to a single bool."""

    name: str
    predicate: Callable

    def __call__(self, flags) -> bool:
        return bool(self.predicate(tuple(flags)))

    @classmethod
    def custom(cls, predicate: Callable, name: Optional[str] = None) -> "DisasterAggregation":
        return cls(name or f"custom:{getattr(predicate, '__name__', 'predicate')}", predicate)


ANY = DisasterAggregation("any", any)
ALL = DisasterAggregation("all", all)


def _as_aggregation(how) -> DisasterAggregation:
    if isinstance(how, DisasterAggregation):
        return how
    if isinstance(how, str):
        key = how.strip().lower()
        if key == "any":
            return ANY
        if key == "all":
            return ALL
        raise ConfigurationError(f"unknown aggregation {how!r}; use 'any', 'all' or a callable")
    if callable(how):
        return DisasterAggregation.custom(how)
    raise ConfigurationError(f"unknown aggregation {how!r}")


def _round_half_up(value: Fraction, places: int = 2) -> str:
    scale = 10 ** places
    scaled = value * scale
    n = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    whole, frac = divmod(n, scale)
    return f"{whole}.{frac:0{places}d}"


@dataclass(frozen=True)
class CoverageReport:
    unit: str
    total: int
    located: int
    rule: str

    def __post_init__(self):
        if not 0 <= self.located <= self.total:
            raise ValueError(f"located={self.located} outside 0..{self.total}")

    @property
    def not_located(self) -> int:
        return self.total - self.located

    @property
    def percent_located(self) -> Fraction:
        if self.total == 0:
            return Fraction(0)
        return Fraction(100 * self.located, self.total)

    @property
    def percent_not_located(self) -> Fraction:
        if self.total == 0:
            return Fraction(0)
        return 100 - self.percent_located

    @property
    def percent_located_text(self) -> str:
        return _round_half_up(self.percent_located)

    @property
    def percent_not_located_text(self) -> str:
        return _round_half_up(self.percent_not_located)

    @property
    def warning(self) -> Optional[str]:
        if self.total == 0:
            return f"no {self.unit} to assess; percent located defined as 0"
        return None

    def to_dict(self) -> dict:
        out = OrderedDict(
            unit=self.unit,
            rule=self.rule,
            total=self.total,
            located=self.located,
            not_located=self.not_located,
            percent_located=self.percent_located_text,
            percent_not_located=self.percent_not_located_text,
            percent_located_exact=f"{self.percent_located.numerator}/{self.percent_located.denominator}",
        )
        if self.warning:
            out["warning"] = self.warning
        return dict(out)


def coordinate_value(value, axis: str) -> Optional[float]:
    """Parse a cell into degrees, or ``None`` when absent/unparseable/out of range."""
    if value is None:
        return None
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        degrees = float(value)
        if degrees != degrees:
            return None
    else:
        degrees = parse_native_coordinate(value, axis)
        if degrees is None:
            return None
    limit = 90.0 if axis == "latitude" else 180.0
    if not -limit <= degrees <= limit:
        logger.warning("%s %r out of range; counted as not located", axis, value)
        return None
    return degrees


def is_located(row, lat_column: str, lng_column: str) -> bool:
    lat = coordinate_value(lookup(row, lat_column), "latitude")
    lng = coordinate_value(lookup(row, lng_column), "longitude")
    return lat is not None and lng is not None


def percent_located_locations(records, lat_column: str = "lat", lng_column: str = "lng") -> CoverageReport:
    """Share of rows (disaster-location pairs) with a valid coordinate pair."""
    rows = list(records)
    require_columns(rows, lat_column, lng_column)
    located = sum(is_located(r, lat_column, lng_column) for r in rows)
    report = CoverageReport("locations", len(rows), located,
                            f"row has valid {lat_column}/{lng_column}")
    if report.warning:
        logger.warning(report.warning)
    return report


def percent_located_disasters(records, lat_column: str = "lat", lng_column: str = "lng",
                              how: Union[str, Callable, DisasterAggregation] = "any",
                              dis_no_column: str = "Dis No") -> CoverageReport:
    """Share of disasters counted as located under ``how``.

    ``how`` is ``"any"``, ``"all"`` or a callable receiving the ordered tuple
    of per-location booleans of one disaster.
    """
    rows = list(records)
    require_columns(rows, lat_column, lng_column, dis_no_column)
    agg = _as_aggregation(how)
    groups: dict = {}
    for row in rows:
        groups.setdefault(lookup(row, dis_no_column), []).append(
            is_located(row, lat_column, lng_column))
    located = 0
    for dis_no, flags in groups.items():
        try:
            located += agg(flags)
        except Exception as exc:
            raise AggregationError(f"aggregation {agg.name!r} failed for {dis_no}: {exc}") from exc
    report = CoverageReport("disasters", len(groups), located,
                            f"{agg.name} of valid {lat_column}/{lng_column}")
    if report.warning:
        logger.warning(report.warning)
    return report


def _render_text(report: CoverageReport) -> str:
    lines = []
    if report.warning:
        lines.append(f"warning: {report.warning}")
    lines += [
        f"unit: {report.unit}",
        f"rule: {report.rule}",
        f"total: {report.total}",
        f"located: {report.located}",
        f"not located: {report.not_located}",
        f"percent located: {report.percent_located_text}",
        f"percent not located: {report.percent_not_located_text}",
    ]
    return "\n".join(lines) + "\n"


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _render_svg(report: CoverageReport) -> str:
    width, height, base, top = 320, 240, 200, 40
    span = base - top
    bars = [
        ("located", report.percent_located, report.percent_located_text, "#2b6cb0"),
        ("not located", report.percent_not_located, report.percent_not_located_text, "#c05621"),
    ]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{_xml_escape(report.unit)} coverage</title>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{_xml_escape(report.unit)}: {report.located} of {report.total} located</text>',
        f'<line x1="30" y1="{base}" x2="{width - 30}" y2="{base}" stroke="#333"/>',
    ]
    for i, (label, pct, text, colour) in enumerate(bars):
        h = round(float(pct) / 100 * span, 2)
        x = 70 + i * 120
        parts.append(f'<rect x="{x}" y="{round(base - h, 2)}" width="60" height="{h}" fill="{colour}"/>')
        parts.append(f'<text x="{x + 30}" y="{round(base - h - 6, 2)}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{text}%</text>')
        parts.append(f'<text x="{x + 30}" y="{base + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_report(report: CoverageReport, format: str = "text") -> bytes:
    """Serialize a report as ``text``, ``json`` or an ``svg`` bar chart."""
    if format == "text":
        return _render_text(report).encode("utf-8")
    if format == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if format in ("svg", "svg-bar-chart"):
        return _render_svg(report).encode("utf-8")
    raise ConfigurationError(f"unknown report format {format!r}; use text, json or svg")
