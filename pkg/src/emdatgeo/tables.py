"""CSV reading/writing shared by every stage.

Booleans are written as ``TRUE``/``FALSE``, absent values as empty cells and
nested match lists as a JSON text column, so the files look like the tables
an R user would get from the equivalent data frame.
"""

from __future__ import annotations

import csv
import io
import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Optional

from .errors import FormatError
from .records import (
    DisasterRecord,
    GeocodedRecord,
    GeocodeMatch,
    GeoPoint,
    LocationizedRecord,
    core_attribute,
    normalize_column,
)

NA_VALUES = frozenset({"", "na", "n/a"})


def is_absent(value: Any) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and value != value:
        return True
    return isinstance(value, str) and value.strip().lower() in NA_VALUES


def clean(value: Any) -> Optional[str]:
    """Cell text, or ``None`` for blanks and ``NA``/``N/A``."""
    if is_absent(value):
        return None
    return str(value)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def parse_bool(text: Any) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().upper()
    if value in ("TRUE", "T", "1", "YES"):
        return True
    if value in ("FALSE", "F", "0", "NO", ""):
        return False
    raise FormatError(f"not a boolean: {text!r}")


@contextmanager
def open_text(source, mode="r"):
    """Yield a text stream for a path, a binary stream or a text stream."""
    if isinstance(source, (str, os.PathLike)):
        if "r" in mode:
            fh = open(source, mode, newline="", encoding="utf-8-sig")
        else:
            fh = open(source, mode, newline="", encoding="utf-8")
        with fh:
            yield fh
        return
    if isinstance(source, io.TextIOBase):
        yield source
        return
    # binary file-like
    if "r" in mode:
        wrapper = io.TextIOWrapper(source, encoding="utf-8-sig", newline="")
    else:
        wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
    try:
        yield wrapper
        wrapper.flush()
    finally:
        wrapper.detach()


def table_header(rows: Iterable[Any]) -> list:
    header: dict = {}
    for row in rows:
        cols = row.row() if isinstance(row, DisasterRecord) else row
        for key in cols:
            header.setdefault(key, None)
    return list(header)


def write_csv(rows, dest, header: Optional[list] = None) -> None:
    """Write records (or mapping rows) as RFC-4180 CSV."""
    rows = list(rows)
    dicts = [r.row() if isinstance(r, DisasterRecord) else dict(r) for r in rows]
    if header is None:
        header = table_header(dicts)
    with open_text(dest, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for d in dicts:
            writer.writerow([format_value(d.get(col)) for col in header])


def to_csv_text(rows, header: Optional[list] = None) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, header=header)
    return buf.getvalue()


def read_csv_rows(source) -> list:
    with open_text(source, "r") as fh:
        return [row for row in csv.reader(fh)]


def _matches_from_cell(cell: Optional[str]) -> tuple:
    if not cell:
        return ()
    try:
        items = json.loads(cell)
    except json.JSONDecodeError as exc:
        raise FormatError(f"matches column is not JSON: {exc}") from None
    return tuple(GeocodeMatch.from_json(obj, rank=i + 1) for i, obj in enumerate(items))


def build_record(header: list, cells: list) -> DisasterRecord:
    """Build the richest record type the columns allow.

    ``location_word`` makes a :class:`LocationizedRecord`; a ``matches`` column
    (or bare ``lat``/``lng``) additionally makes a :class:`GeocodedRecord`.
    Unrecognized columns go to ``extras`` in source order, or to ``derived``
    when they follow the locationizer/geocoder columns.
    """
    kwargs: dict = {}
    extras: dict = {}
    derived: dict = {}
    geo: dict = {}
    trailing = False
    for name, cell in zip(header, cells):
        attr = core_attribute(name)
        norm = normalize_column(name)
        if attr is not None and attr not in kwargs:
            kwargs[attr] = clean(cell)
        elif norm == "locationword":
            kwargs["location_word"] = cell or ""
            trailing = True
        elif norm == "uncertainlocationspecificity":
            kwargs["uncertain_location_specificity"] = parse_bool(cell)
            trailing = True
        elif name in ("lat", "lng", "matches"):
            geo[name] = clean(cell)
            trailing = True
        elif trailing:
            # appended by a later stage (in_box, lat1, ...); keep it after the typed columns
            derived[name] = clean(cell)
        else:
            extras[name] = clean(cell)
    for attr in ("country", "disaster_type"):
        if kwargs.get(attr) is None:
            kwargs[attr] = ""
    kwargs["dis_no"] = kwargs.get("dis_no") or ""
    kwargs["extras"] = extras
    kwargs["derived"] = derived
    if "location_word" not in kwargs and "uncertain_location_specificity" not in kwargs:
        extras.update(geo)
        extras.update(derived)
        kwargs["derived"] = {}
        return DisasterRecord(**kwargs)
    if not geo:
        return LocationizedRecord(**kwargs)
    if "matches" in geo:
        matches = _matches_from_cell(geo["matches"])
    elif geo.get("lat") is not None and geo.get("lng") is not None:
        matches = (GeocodeMatch(GeoPoint(float(geo["lat"]), float(geo["lng"]))),)
    else:
        matches = ()
    return GeocodedRecord(matches=matches, **kwargs)


def read_table(source) -> list:
    """Read a CSV written by :func:`write_csv` (any stage) back into records."""
    rows = read_csv_rows(source)
    if not rows:
        raise FormatError("empty table: no header row")
    header, body = rows[0], rows[1:]
    if not any(normalize_column(h) == "disno" for h in header):
        raise FormatError(f"no 'Dis No' column; columns seen: {header}")
    return [build_record(header, r) for r in body if any(c.strip() for c in r)]


def read_plain_table(source) -> list:
    """Read any CSV into ``dict`` rows (used for unwrapped geocoder output)."""
    with open_text(source, "r") as fh:
        return [dict(r) for r in csv.DictReader(fh)]


def ensure_parent(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
