"""Client for the GeoNames ``searchJSON`` endpoint.

The free GeoNames plan allows 1,000 credits per hour and 20,000 per day.
Every live request goes through a :class:`QuotaLimiter` that keeps a
timestamp log of recent requests and blocks until one more request fits in
both sliding windows.  Results are cached per ``(word, country)`` key, and an
offline mode answers from recorded responses so tests never need a network
or a username.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional
from urllib.parse import quote_plus

import requests

from .errors import ConfigurationError, GeoNamesError, QuotaExhaustedError, TransientServiceError
from .records import GeocodeMatch

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "http://api.geonames.org"
HOUR = 3600.0
DAY = 86400.0
RETRY_DELAYS = (1.0, 2.0, 4.0)
MAX_ATTEMPTS = 3
# GeoNames status codes: 18 daily, 19 hourly, 20 weekly limit exceeded
QUOTA_STATUS_CODES = frozenset({18, 19, 20})
NO_RESULT_STATUS = 15


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def wall(self) -> float:
        return time.time()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class SimulatedClock:
    """Deterministic clock: ``sleep`` just advances ``now``."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self.sleeps: list = []
        self._lock = threading.Lock()

    def now(self) -> float:
        return self._now

    def wall(self) -> float:
        return self._now

    def sleep(self, seconds: float) -> None:
        with self._lock:
            self.sleeps.append(seconds)
            if seconds > 0:
                self._now += seconds

    def advance(self, seconds: float) -> None:
        self._now += seconds


@dataclass
class GeoNamesConfig:
    username: Optional[str] = None
    base_url: str = DEFAULT_BASE_URL
    hourly_budget: int = 1000
    daily_budget: int = 20000
    timeout: float = 30.0
    mode: str = "live"
    fixtures: Optional[str] = None
    cache_dir: Optional[str] = None
    search_param: str = "q"

    def __post_init__(self):
        if self.hourly_budget <= 0 or self.daily_budget <= 0:
            raise ConfigurationError("query budgets must be positive")
        if self.mode not in ("live", "offline-fixtures"):
            raise ConfigurationError(f"mode must be 'live' or 'offline-fixtures', got {self.mode!r}")
        if self.mode == "live" and not (self.username and self.username.strip()):
            raise ConfigurationError(
                "live GeoNames mode needs a username (flag or GEONAMES_USERNAME)")
        if self.mode == "offline-fixtures" and not self.fixtures:
            raise ConfigurationError("offline-fixtures mode needs a fixture path")
        if self.search_param not in ("q", "name", "name_equals"):
            raise ConfigurationError(f"unsupported search parameter {self.search_param!r}")

    @classmethod
    def from_env(cls, username: Optional[str] = None, **kwargs) -> "GeoNamesConfig":
        """Flag value wins over ``GEONAMES_USERNAME``."""
        return cls(username=username or os.environ.get("GEONAMES_USERNAME"), **kwargs)

    def to_dict(self) -> dict:
        return asdict(self)


def normalize_key(word: str) -> str:
    return " ".join(str(word).lower().split())


class QuotaLimiter:
    """Sliding-window request log shared by every worker of one client.

    A permit is granted when fewer than ``hourly_budget`` requests happened
    in the last 3600 s and fewer than ``daily_budget`` in the last 86400 s;
    otherwise :meth:`acquire` sleeps until the oldest blocking request ages
    out of its window.
    """

    def __init__(self, hourly_budget: int = 1000, daily_budget: int = 20000, clock=None):
        if hourly_budget <= 0 or daily_budget <= 0:
            raise ConfigurationError("query budgets must be positive")
        self.hourly_budget = hourly_budget
        self.daily_budget = daily_budget
        self.clock = clock or SystemClock()
        self._log: deque = deque()
        self._lock = threading.Lock()
        self.issued: list = []

    def _expire(self, now: float) -> None:
        while self._log and self._log[0] <= now - DAY:
            self._log.popleft()

    def required_wait(self) -> float:
        """Seconds until one more request may be issued (0 when free now)."""
        with self._lock:
            return self._required_wait(self.clock.now())

    def _required_wait(self, now: float) -> float:
        self._expire(now)
        wait = 0.0
        if len(self._log) >= self.daily_budget:
            oldest = self._log[len(self._log) - self.daily_budget]
            wait = max(wait, oldest + DAY - now)
        if len(self._log) >= self.hourly_budget:
            oldest = self._log[len(self._log) - self.hourly_budget]
            if oldest > now - HOUR:
                wait = max(wait, oldest + HOUR - now)
        return max(wait, 0.0)

    def acquire(self) -> float:
        """Block until a request fits both windows, record it, return seconds waited."""
        waited = 0.0
        with self._lock:
            while True:
                now = self.clock.now()
                wait = self._required_wait(now)
                if wait <= 0:
                    self._log.append(now)
                    self.issued.append(now)
                    return waited
                self.clock.sleep(wait)
                waited += wait


def acquire_quota(config: GeoNamesConfig, clock=None, limiter: Optional[QuotaLimiter] = None) -> float:
    limiter = limiter or QuotaLimiter(config.hourly_budget, config.daily_budget, clock)
    return limiter.acquire()


@dataclass
class CacheEntry:
    key: tuple
    matches: list
    fetched_at: float = 0.0
    max_rows: int = 1

    def to_json(self) -> dict:
        return {
            "key": {"word": self.key[0], "country": self.key[1]},
            "max_rows": self.max_rows,
            "fetched_at": self.fetched_at,
            "matches": [m.to_json() for m in self.matches],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CacheEntry":
        key = (obj["key"]["word"], obj["key"].get("country"))
        matches = [GeocodeMatch.from_json(m) for m in obj["matches"]]
        return cls(key, matches, float(obj.get("fetched_at", 0.0)), int(obj.get("max_rows", 1)))

    def covers(self, max_rows: int) -> bool:
        return self.max_rows >= max_rows or len(self.matches) < self.max_rows


def cache_key(word: str, country: Optional[str]) -> tuple:
    return normalize_key(word), (country.upper() if country else None)


class MemoryCache:
    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def lookup(self, key) -> Optional[CacheEntry]:
        with self._lock:
            return self._data.get(key)

    def store(self, entry: CacheEntry) -> None:
        with self._lock:
            self._data[entry.key] = entry


class DirectoryCache(MemoryCache):
    """One JSON file per key; survives restarts, corrupt files act as misses."""

    def __init__(self, directory):
        super().__init__()
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key) -> Path:
        digest = hashlib.sha1(json.dumps(list(key)).encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def lookup(self, key) -> Optional[CacheEntry]:
        entry = super().lookup(key)
        if entry is not None:
            return entry
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = CacheEntry.from_json(json.loads(path.read_text(encoding="utf-8")))
        except (ValueError, KeyError, TypeError) as exc:
            logger.warning("corrupt cache file %s (%s); treating as miss", path, exc)
            return None
        if entry.key != tuple(key):
            return None
        super().store(entry)
        return entry

    def store(self, entry: CacheEntry) -> None:
        super().store(entry)
        path = self._path(entry.key)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(entry.to_json(), sort_keys=True, indent=1), encoding="utf-8")
        os.replace(tmp, path)


def fixture_filename(word: str, country: Optional[str]) -> str:
    """``north carolina`` + ``US`` -> ``north+carolina__US.json``."""
    word, country = cache_key(word, country)
    stem = quote_plus(word)
    return f"{stem}__{country}.json" if country else f"{stem}.json"


class FixtureStore:
    """Recorded ``searchJSON`` responses, keyed like the cache.

    ``path`` is either a directory of ``<word>__<CC>.json`` files holding raw
    service responses, or a JSON-lines file of
    ``{"q": ..., "country": ..., "response": {...}}`` objects.
    """

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.exists():
            raise ConfigurationError(f"fixture store {self.path} does not exist")
        self._lines: Optional[dict] = None
        if self.path.is_file():
            self._lines = {}
            with self.path.open(encoding="utf-8") as fh:
                for n, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise ConfigurationError(f"{self.path}:{n}: bad fixture line: {exc}") from None
                    self._lines[cache_key(obj["q"], obj.get("country"))] = obj["response"]

    def response(self, word: str, country: Optional[str]) -> Optional[dict]:
        if self._lines is not None:
            return self._lines.get(cache_key(word, country))
        path = self.path / fixture_filename(word, country)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


def parse_search_response(payload: dict, max_rows: int) -> list:
    """Matches from a ``searchJSON`` payload, raising on service status errors."""
    status = payload.get("status")
    if status:
        value = status.get("value")
        message = status.get("message", "GeoNames error")
        if value in QUOTA_STATUS_CODES:
            raise QuotaExhaustedError(message, status_value=value)
        if value == NO_RESULT_STATUS:
            return []
        raise GeoNamesError(f"GeoNames status {value}: {message}")
    out = []
    for item in payload.get("geonames", [])[:max_rows]:
        out.append(GeocodeMatch.from_json(item, rank=len(out) + 1))
    return out


class GeoNamesClient:
    """Rate-limited, cached toponym search.

    Share one instance across workers: quota accounting and cache writes go
    through the same limiter and cache.  Several processes using one
    username are not coordinated.
    """

    def __init__(self, config: GeoNamesConfig, *, clock=None, session=None, cache=None,
                 limiter: Optional[QuotaLimiter] = None):
        self.config = config
        self.clock = clock or SystemClock()
        self.limiter = limiter or QuotaLimiter(config.hourly_budget, config.daily_budget, self.clock)
        if cache is None:
            cache = DirectoryCache(config.cache_dir) if config.cache_dir else MemoryCache()
        self.cache = cache
        self.fixtures = FixtureStore(config.fixtures) if config.mode == "offline-fixtures" else None
        self._session = session
        self.network_calls = 0

    @property
    def session(self):
        if self._session is None:
            self._session = requests.Session()
        return self._session

    def search(self, word: str, country_bias: Optional[str] = None, max_rows: int = 1) -> list:
        """Ordered matches for ``word``; an empty list when nothing matched."""
        if max_rows < 1:
            raise ConfigurationError("max_rows must be >= 1")
        if not word or not str(word).strip():
            return []
        key = cache_key(word, country_bias)
        entry = self.cache.lookup(key)
        if entry is not None and entry.covers(max_rows):
            return list(entry.matches[:max_rows])
        if self.fixtures is not None:
            payload = self.fixtures.response(*key)
            if payload is None:
                logger.warning("no fixture for %r (%s); treating as no match", key[0], key[1])
                matches = []
            else:
                matches = parse_search_response(payload, max_rows)
        else:
            matches = self._live_search(key[0], key[1], max_rows)
        self.cache.store(CacheEntry(key, matches, self.clock.wall(), max_rows))
        return matches

    def _params(self, word, country, max_rows) -> dict:
        params = {self.config.search_param: word}
        if country:
            params["country"] = country
        params["maxRows"] = max_rows
        params["username"] = self.config.username
        return params

    def _live_search(self, word, country, max_rows) -> list:
        url = self.config.base_url.rstrip("/") + "/searchJSON"
        params = self._params(word, country, max_rows)
        last_exc = None
        for attempt in range(MAX_ATTEMPTS):
            self.limiter.acquire()
            self.network_calls += 1
            try:
                resp = self.session.get(url, params=params, timeout=self.config.timeout)
                if resp.status_code >= 500 or resp.status_code == 429:
                    raise requests.HTTPError(f"HTTP {resp.status_code}", response=resp)
                if resp.status_code >= 400:
                    raise GeoNamesError(f"HTTP {resp.status_code} from GeoNames for {word!r}")
                payload = resp.json()
            except (requests.RequestException, ValueError) as exc:
                last_exc = exc
                if attempt + 1 < MAX_ATTEMPTS:
                    delay = RETRY_DELAYS[attempt]
                    logger.warning("GeoNames request for %r failed (%s); retrying in %ss", word, exc, delay)
                    self.clock.sleep(delay)
                continue
            return parse_search_response(payload, max_rows)
        raise TransientServiceError(
            f"GeoNames request for {word!r} failed after {MAX_ATTEMPTS} attempts: {last_exc}")
