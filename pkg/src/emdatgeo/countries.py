"""Country name to ISO 3166-1 alpha-2 lookup for GeoNames country bias.

EM-DAT writes country names in the ISO "short name" style, e.g.
``United States of America (the)`` or ``Korea (the Republic of)``.  The
bundled table (``data/iso3166.csv``) carries the ISO names plus official and
common names.
"""

from __future__ import annotations

import csv
import re
from functools import lru_cache
from importlib import resources
from typing import Optional

_TRAILING_PAREN = re.compile(r"\s*\(([^()]*)\)\s*$")


@lru_cache(maxsize=1)
def _table() -> tuple:
    exact: dict = {}
    folded: dict = {}
    text = resources.files("emdatgeo").joinpath("data/iso3166.csv").read_text(encoding="utf-8")
    for row in csv.DictReader(text.splitlines()):
        exact.setdefault(row["name"], row["alpha_2"])
        folded.setdefault(row["name"].casefold(), row["alpha_2"])
    return exact, folded


def _lookup(name: str) -> Optional[str]:
    exact, folded = _table()
    return exact.get(name) or folded.get(name.casefold())


def country_to_iso2(country_name: Optional[str]) -> Optional[str]:
    """``United States of America (the)`` -> ``US``; unknown names -> ``None``."""
    if not country_name or not country_name.strip():
        return None
    name = " ".join(country_name.split())
    code = _lookup(name)
    if code:
        return code
    m = _TRAILING_PAREN.search(name)
    if m is None:
        return None
    stem = name[: m.start()].strip()
    inner = m.group(1).strip()
    candidates = []
    if inner and inner.lower() != "the":
        # "Korea (the Republic of)" -> "Korea, Republic of"
        candidates.append(f"{stem}, {inner}")
        if inner.lower().startswith("the "):
            candidates.append(f"{stem}, {inner[4:]}")
    candidates.append(stem)
    for candidate in candidates:
        code = _lookup(candidate)
        if code:
            return code
    return None
