"""Geocoding a locationized table through :class:`~emdatgeo.geonames.GeoNamesClient`."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .countries import country_to_iso2
from .errors import ConfigurationError, QuotaExhaustedError
from .geonames import GeoNamesClient, GeoNamesConfig
from .records import GeocodedRecord, record_fields

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchPlan:
    """990 rows then a 4800 s pause keeps a free account under 1,000 queries/hour."""

    batch_size: int = 990
    wait_time: float = 4800.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.wait_time < 0:
            raise ConfigurationError("wait_time must be >= 0")


def _client(config, client) -> GeoNamesClient:
    if client is not None:
        return client
    if config is None:
        raise ConfigurationError("geocoding needs a GeoNamesConfig or a GeoNamesClient")
    return GeoNamesClient(config)


def _geocode_row(client, record, n_results, country_bias) -> GeocodedRecord:
    base = record_fields(record)
    base.pop("matches", None)
    word = record.location_word
    matches = ()
    if word:
        bias = country_to_iso2(record.country) if country_bias else None
        matches = tuple(client.search(word, bias, n_results))
    return GeocodedRecord(matches=matches, **base)


def geocode(records, n_results: int = 1, unwrap: bool = False,
            config: Optional[GeoNamesConfig] = None, *, client: Optional[GeoNamesClient] = None,
            country_bias: bool = True, workers: int = 1, _offset: int = 0) -> list:
    """Attach GeoNames matches to every row, preserving row count and order.

    Returns :class:`GeocodedRecord` objects, or plain dict rows with
    ``lat1``, ``lng1``, ..., ``latN``, ``lngN`` columns when ``unwrap`` is
    set.  On quota exhaustion the raised error carries ``resume_index`` and
    the rows completed so far.
    """
    if n_results < 1:
        raise ConfigurationError("n_results must be >= 1")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    client = _client(config, client)
    records = list(records)
    out: list = []
    try:
        if workers == 1:
            for record in records:
                out.append(_geocode_row(client, record, n_results, country_bias))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_geocode_row, client, r, n_results, country_bias)
                           for r in records]
                for fut in futures:
                    out.append(fut.result())
    except QuotaExhaustedError as exc:
        exc.resume_index = _offset + len(out)
        exc.completed = _shape(out, n_results, unwrap)
        raise
    return _shape(out, n_results, unwrap)


def _shape(rows, n_results, unwrap) -> list:
    if unwrap:
        return [r.unwrapped_row(n_results) for r in rows]
    return list(rows)


def geocode_batches(records, batch_plan: Optional[BatchPlan] = None, n_results: int = 1,
                    unwrap: bool = False, config: Optional[GeoNamesConfig] = None, *,
                    client: Optional[GeoNamesClient] = None, clock=None,
                    country_bias: bool = True, workers: int = 1) -> list:
    """:func:`geocode` in slices of ``batch_size`` rows with ``wait_time`` pauses between them."""
    plan = batch_plan or BatchPlan()
    client = _client(config, client)
    clock = clock or client.clock
    records = list(records)
    out: list = []
    for start in range(0, len(records), plan.batch_size):
        if start:
            logger.info("batch done at row %d; waiting %ss", start, plan.wait_time)
            clock.sleep(plan.wait_time)
        chunk = records[start:start + plan.batch_size]
        try:
            out.extend(geocode(chunk, n_results, unwrap, client=client,
                               country_bias=country_bias, workers=workers, _offset=start))
        except QuotaExhaustedError as exc:
            exc.completed = out + exc.completed
            raise
    return out
