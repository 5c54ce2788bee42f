"""Splitting EM-DAT location strings into one row per disaster-location pair.

EM-DAT keeps every affected place of a disaster in one free-text field and
the list style varies from row to row (``A, B, and C``, ``(1) A (2) B (3) C``,
``A (B and C)``).  :func:`split_locations` normalizes all of them with one
set of delimiter patterns and drops generic administrative words such as
``provinces``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ConfigurationError
from .records import LocationizedRecord, record_fields, require_columns

#: Delimiter patterns, tried in this order at each position.
DEFAULT_JOINERS = (
    r"\(\s*\d+\s*\)",          # (1) (2) enumeration
    r"\b\d+\s*[.)]",           # 1) 2. enumeration
    r",",
    r";",
    r"\(",
    r"\)",
    r"\band\b",
    r"&",
    r"/",
    r"[\r\n]+",
)

#: Words naming an administrative level rather than a place; removed as whole words.
DEFAULT_DUMMY_WORDS = frozenset({
    "state", "states",
    "province", "provinces",
    "district", "districts",
    "city", "cities",
    "town", "towns",
    "region", "regions",
    "village", "villages",
    "county", "counties",
    "department", "departments",
    "municipality", "municipalities",
    "island", "islands",
    "near",
    "area", "areas",
})

_EDGE_PUNCT = " \t.-:'\"`"


@dataclass(frozen=True)
class SplitConfig:
    joiner_patterns: tuple = DEFAULT_JOINERS
    dummy_words: frozenset = DEFAULT_DUMMY_WORDS

    def __post_init__(self):
        if not self.joiner_patterns:
            raise ConfigurationError("at least one joiner pattern is required")
        for pattern in self.joiner_patterns:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise ConfigurationError(f"bad joiner pattern {pattern!r}: {exc}") from None

    def extend(self, joiner_regex: Iterable[str] = (), dummy_words: Iterable[str] = (),
               replace_defaults: bool = False) -> "SplitConfig":
        """New config with extra joiners/dummy words (or only those, if ``replace_defaults``)."""
        joiners = tuple(joiner_regex)
        words = frozenset(w.strip().lower() for w in dummy_words if w.strip())
        if replace_defaults:
            return SplitConfig(joiners or self.joiner_patterns, words)
        return SplitConfig(
            self.joiner_patterns + tuple(j for j in joiners if j not in self.joiner_patterns),
            self.dummy_words | words,
        )

    def splitter(self) -> re.Pattern:
        return re.compile("|".join(f"(?:{p})" for p in self.joiner_patterns))

    def dummy_pattern(self) -> Optional[re.Pattern]:
        if not self.dummy_words:
            return None
        # longest first so "states" wins over "state"
        words = sorted(self.dummy_words, key=lambda w: (-len(w), w))
        alternation = "|".join(r"\s+".join(map(re.escape, w.split())) for w in words)
        return re.compile(rf"(?<!\w)(?:{alternation})(?!\w)")


def default_split_config() -> SplitConfig:
    return SplitConfig()


def split_location_string(text: Optional[str], config: Optional[SplitConfig] = None) -> tuple:
    """Split one location string; returns ``(location_words, uncertain_flag)``."""
    if text is None:
        return [], False
    config = config or SplitConfig()
    text = text.lower()
    uncertain = "(" in text or ")" in text
    splitter = config.splitter()
    dummy = config.dummy_pattern()
    if dummy is not None:
        text = dummy.sub(" ", text)
    pending = [text]
    words = []
    # Re-split after trimming: stripping edge punctuation can expose a delimiter.
    while pending:
        token = pending.pop(0)
        pieces = splitter.split(token)
        if len(pieces) > 1:
            pending[0:0] = pieces
            continue
        word = " ".join(token.split()).strip(_EDGE_PUNCT)
        word = " ".join(word.split())
        if not word:
            continue
        if word != token and splitter.search(word):
            pending.insert(0, word)
            continue
        if dummy is not None and dummy.fullmatch(word):
            continue
        words.append(word)
    return words, uncertain


def split_locations(records, column: str = "Location", config: Optional[SplitConfig] = None,
                    *, joiner_regex: Iterable[str] = (), dummy_words: Iterable[str] = (),
                    dedupe: bool = False) -> list:
    """Locationize records: one output row per (disaster, location word).

    A record whose location is missing, or holds only dummy words, still
    yields one row with an empty ``location_word`` so disaster counts are
    never lost.
    """
    records = list(records)
    require_columns(records, column)
    config = (config or SplitConfig()).extend(joiner_regex, dummy_words)
    out = []
    for record in records:
        base = record_fields(record)
        base.pop("location_word", None)
        base.pop("uncertain_location_specificity", None)
        base.pop("matches", None)
        raw = record.get(column)
        words, uncertain = split_location_string(None if raw is None else str(raw), config)
        if dedupe:
            words = list(dict.fromkeys(words))
        if not words:
            words = [""]
        for word in words:
            out.append(LocationizedRecord(
                location_word=word, uncertain_location_specificity=uncertain, **base))
    return out


__all__ = [
    "DEFAULT_DUMMY_WORDS",
    "DEFAULT_JOINERS",
    "SplitConfig",
    "default_split_config",
    "split_location_string",
    "split_locations",
]
