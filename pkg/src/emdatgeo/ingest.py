"""Loading EM-DAT public exports.

EM-DAT exports may start with a block of query metadata (timestamp, version,
request type) above the real column header.  :func:`read_emdat` finds the
header row, keeps the block as raw text, and turns each data row into a
:class:`~emdatgeo.records.DisasterRecord`.
"""

from __future__ import annotations

import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError, FormatError, ValidationError
from .records import DisasterRecord, core_attribute, normalize_column
from .tables import clean, read_csv_rows, write_csv

logger = logging.getLogger(__name__)


@dataclass
class EmdatMetadata:
    """Key/value lines found above the column header, all kept as raw text."""

    timestamp: Optional[str] = None
    version: Optional[str] = None
    request_type: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def items(self) -> list:
        out = []
        for key in ("timestamp", "version", "request_type"):
            value = getattr(self, key)
            if value is not None:
                out.append((key, value))
        out.extend(self.extra.items())
        return out

    def __len__(self) -> int:
        return len(self.items())

    def to_dict(self) -> dict:
        return dict(self.items())


_TIMESTAMP_KEYS = ("timestamp", "created", "creationdate", "exportdate")
_VERSION_KEYS = ("version",)
_REQUEST_KEYS = ("request", "requesttype", "typeofrequest", "query", "querytype")


def _split_metadata_row(row: list) -> Optional[tuple]:
    cells = [c.strip() for c in row if c and c.strip()]
    if not cells:
        return None
    if len(cells) >= 2:
        return cells[0].rstrip(":").strip(), ", ".join(cells[1:])
    key, sep, value = cells[0].partition(":")
    if not sep:
        return cells[0], ""
    return key.strip(), value.strip()


def _is_header_row(row: list) -> bool:
    return any(normalize_column(cell) == "disno" for cell in row if cell)


def detect_header_block(lines) -> tuple:
    """Return ``(rows before the column header, metadata parsed from them)``.

    The column header is the first row with a ``Dis No`` style cell.
    """
    lines = list(lines)
    if not lines:
        raise FormatError("no rows to scan for a header")
    for index, row in enumerate(lines):
        if _is_header_row(row):
            break
    else:
        raise FormatError("no column header containing 'Dis No' found")
    meta = EmdatMetadata()
    for row in lines[:index]:
        pair = _split_metadata_row(row)
        if pair is None:
            continue
        key, value = pair
        norm = normalize_column(key)
        if norm in _TIMESTAMP_KEYS and meta.timestamp is None:
            meta.timestamp = value
        elif norm in _VERSION_KEYS and meta.version is None:
            meta.version = value
        elif norm in _REQUEST_KEYS and meta.request_type is None:
            meta.request_type = value
        else:
            name, n = key, 2
            while name in meta.extra:
                name, n = f"{key} ({n})", n + 1
            meta.extra[name] = value
    return index, meta


_COORD_RE = re.compile(
    r"^\s*(?P<pre>[NSEWnsew])?\s*(?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+))\s*°?\s*(?P<post>[NSEWnsew])?\s*$"
)
_HEMISPHERES = {"latitude": {"N": 1, "S": -1}, "longitude": {"E": 1, "W": -1}}


def parse_native_coordinate(text, axis: str) -> Optional[float]:
    """Signed degrees from EM-DAT coordinate text (``48.60 N`` -> 48.6).

    Blank input gives ``None``.  Unparseable text also gives ``None`` and logs
    a warning; native coordinates are auxiliary and never abort a load.
    """
    if axis in ("lat", "lng"):
        axis = {"lat": "latitude", "lng": "longitude"}[axis]
    if axis not in _HEMISPHERES:
        raise ConfigurationError(f"axis must be 'latitude' or 'longitude', got {axis!r}")
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return None if text != text else float(text)
    value = clean(text)
    if value is None:
        return None
    m = _COORD_RE.match(value)
    if m is None or (m["pre"] and m["post"]):
        logger.warning("unparseable %s %r treated as absent", axis, text)
        return None
    hemi = (m["pre"] or m["post"] or "").upper()
    degrees = float(m["num"])
    if hemi:
        sign = _HEMISPHERES[axis].get(hemi)
        if sign is None:
            logger.warning("hemisphere %r is not valid for %s in %r", hemi, axis, text)
            return None
        if degrees < 0:
            logger.warning("signed value with hemisphere suffix %r treated as absent", text)
            return None
        degrees *= sign
    return degrees


def _read_xlsx_rows(path) -> list:
    try:
        import openpyxl
    except ImportError:  # pragma: no cover - depends on the environment
        raise ConfigurationError(
            "reading .xlsx needs the optional 'openpyxl' package (pip install artifact[xlsx])"
        ) from None
    wb = openpyxl.load_workbook(path, read_only=True, data_only=True)
    try:
        ws = wb.worksheets[0]
        rows = []
        for values in ws.iter_rows(values_only=True):
            rows.append(["" if v is None else str(v) for v in values])
        return rows
    finally:
        wb.close()


def _is_xlsx(source) -> bool:
    return isinstance(source, (str, os.PathLike)) and Path(source).suffix.lower() in (".xlsx", ".xlsm")


def read_emdat(source, with_metadata: bool = False):
    """Load an EM-DAT export.

    ``source`` is a path (CSV, or ``.xlsx`` when openpyxl is installed) or a
    binary/text stream of CSV.  Returns the list of records, or
    ``(records, metadata)`` when ``with_metadata`` is set; metadata is
    ``None`` if the file has no header block.
    """
    rows = _read_xlsx_rows(source) if _is_xlsx(source) else read_csv_rows(source)
    if not rows:
        raise FormatError("no 'Dis No' column found; file is empty")
    try:
        skip, meta = detect_header_block(rows)
    except FormatError:
        seen = sorted({c for r in rows[:25] for c in r if c})
        raise FormatError(f"no 'Dis No' column found; cells seen near the top: {seen}") from None
    header = [h.strip() for h in rows[skip]]

    mapping: dict = {}
    for pos, name in enumerate(header):
        attr = core_attribute(name)
        if attr is not None and attr not in mapping.values():
            mapping[pos] = attr

    records = []
    for lineno, cells in enumerate(rows[skip + 1:], start=skip + 2):
        if not any(c and c.strip() for c in cells):
            continue
        kwargs: dict = {"country": "", "disaster_type": ""}
        extras: dict = {}
        for pos, name in enumerate(header):
            cell = cells[pos] if pos < len(cells) else ""
            if pos in mapping:
                value = clean(cell)
                if mapping[pos] in ("country", "disaster_type", "dis_no"):
                    value = value or ""
                kwargs[mapping[pos]] = value.strip() if mapping[pos] == "dis_no" else value
            else:
                key = name
                n = 2
                while key in extras:
                    key, n = f"{name}.{n}", n + 1
                extras[key] = clean(cell)
        if not kwargs.get("dis_no"):
            raise ValidationError(f"row {lineno}: empty Dis No")
        records.append(DisasterRecord(extras=extras, **kwargs))

    dupes = sorted(k for k, n in Counter(r.dis_no for r in records).items() if n > 1)
    if dupes:
        raise ValidationError(f"duplicate Dis No values: {', '.join(dupes)}")

    if with_metadata:
        return records, (meta if skip > 0 else None)
    return records


def write_emdat(records, dest) -> None:
    """Write records back as a plain CSV export (no metadata block)."""
    write_csv(records, dest)
