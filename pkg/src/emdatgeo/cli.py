"""``emdatgeo`` command line: each subcommand is one file-to-file step.

    emdatgeo locationize export.csv pairs.csv
    emdatgeo geocode --offline-fixtures FIXTURES pairs.csv geocoded.csv
    emdatgeo coverage --unit disasters --how any geocoded.csv
    emdatgeo filter-box --top-left 40,-119 --bottom-right 35,-75 geocoded.csv boxed.csv
    emdatgeo pipeline export.csv outdir/

Errors go to stderr as a single JSON line; exit codes: 2 configuration/usage,
3 I/O, 4 format/validation, 5 GeoNames quota, 6 other GeoNames failures.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from .coverage import percent_located_disasters, percent_located_locations, render_report
from .errors import ConfigurationError, EmdatGeoError, FormatError, QuotaExhaustedError
from .geocoder import BatchPlan, geocode, geocode_batches
from .geonames import DEFAULT_BASE_URL, GeoNamesClient, GeoNamesConfig
from .ingest import read_emdat
from .locationizer import SplitConfig, split_locations
from .records import LocationizedRecord
from .spatial import BoundingBox, located_in_box, located_in_shapefile
from .tables import ensure_parent, read_table, write_csv

logger = logging.getLogger("emdatgeo")

EXIT_CODES = {
    "configuration": 2,
    "io": 3,
    "format": 4,
    "validation": 4,
    "quota": 5,
    "service": 6,
    "transport": 6,
    "error": 1,
}

DEFAULTS = {
    "command": None,
    "input": None,
    "output": None,
    "geonames": {
        "username": None,
        "base_url": DEFAULT_BASE_URL,
        "hourly_budget": 1000,
        "daily_budget": 20000,
        "timeout": 30.0,
        "fixtures": None,
        "cache_dir": None,
        "search_param": "q",
    },
    "split": {
        "column": "Location",
        "joiner_regex": [],
        "dummy_words": [],
        "replace_defaults": False,
        "dedupe": False,
    },
    "batch": {"enabled": False, "batch_size": 990, "wait_time": 4800.0},
    "geocode": {"n_results": 1, "unwrap": False, "country_bias": True, "workers": 1},
    "columns": {"lat": "lat", "lng": "lng"},
    "coverage": {"unit": "locations", "how": "any", "format": "text"},
    "box": {"top_left": None, "bottom_right": None},
    "region": None,
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        elif value is not None:
            out[key] = value
    return out


def _latlng(text: str) -> list:
    try:
        lat, lng = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAT,LNG, got {text!r}") from None
    return [lat, lng]


def _overrides(args) -> dict:
    """Only options the user actually gave (argparse defaults are None)."""
    g = lambda name: getattr(args, name, None)  # noqa: E731
    batch_given = g("batch_size") is not None or g("wait_time") is not None
    return {
        "command": args.command,
        "input": g("input"),
        "output": g("output"),
        "geonames": {
            "username": g("username"),
            "base_url": g("base_url"),
            "hourly_budget": g("hourly_budget"),
            "daily_budget": g("daily_budget"),
            "timeout": g("timeout"),
            "fixtures": g("offline_fixtures"),
            "cache_dir": g("cache_dir"),
        },
        "split": {
            "column": g("column"),
            "joiner_regex": g("joiner"),
            "dummy_words": g("dummy_word"),
            "replace_defaults": g("replace_defaults"),
            "dedupe": g("dedupe"),
        },
        "batch": {
            "enabled": True if batch_given else None,
            "batch_size": g("batch_size"),
            "wait_time": g("wait_time"),
        },
        "geocode": {
            "n_results": g("n_results"),
            "unwrap": g("unwrap"),
            "country_bias": False if g("no_country_bias") else None,
            "workers": g("workers"),
        },
        "columns": {"lat": g("lat_col"), "lng": g("lng_col")},
        "coverage": {"unit": g("unit"), "how": g("how"), "format": g("format")},
        "box": {"top_left": g("top_left"), "bottom_right": g("bottom_right")},
        "region": g("region"),
    }


def resolve_config(args, environ=None) -> dict:
    """Built-in defaults < ``--config`` file < command-line flags < (username) env var fallback."""
    import os

    environ = os.environ if environ is None else environ
    config = copy.deepcopy(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{args.config}: {exc}") from None
        config = _merge(config, loaded)
    config = _merge(config, _overrides(args))
    if not config["geonames"]["username"] and not config["geonames"]["fixtures"]:
        config["geonames"]["username"] = environ.get("GEONAMES_USERNAME") or None
    return config


def _geonames_config(cfg: dict) -> GeoNamesConfig:
    g = cfg["geonames"]
    mode = "offline-fixtures" if g["fixtures"] else "live"
    return GeoNamesConfig(
        username=g["username"], base_url=g["base_url"], hourly_budget=int(g["hourly_budget"]),
        daily_budget=int(g["daily_budget"]), timeout=float(g["timeout"]), mode=mode,
        fixtures=g["fixtures"], cache_dir=g["cache_dir"], search_param=g["search_param"])


def _need(cfg, key):
    if not cfg.get(key):
        raise ConfigurationError(f"missing {key} path")
    return cfg[key]


def _load_records(path):
    try:
        return read_table(path)
    except FormatError:
        return read_emdat(path)


def _locationize(cfg, records):
    s = cfg["split"]
    split = SplitConfig().extend(s["joiner_regex"], s["dummy_words"], s["replace_defaults"])
    return split_locations(records, s["column"], split, dedupe=s["dedupe"])


def _geocode(cfg, records, client=None):
    records = list(records)
    if records and not isinstance(records[0], LocationizedRecord):
        raise ConfigurationError("geocode needs a locationized table; run 'locationize' first")
    client = client or GeoNamesClient(_geonames_config(cfg))
    opts = cfg["geocode"]
    kwargs = dict(n_results=int(opts["n_results"]), unwrap=bool(opts["unwrap"]), client=client,
                  country_bias=bool(opts["country_bias"]), workers=int(opts["workers"]))
    if cfg["batch"]["enabled"]:
        plan = BatchPlan(int(cfg["batch"]["batch_size"]), float(cfg["batch"]["wait_time"]))
        return geocode_batches(records, plan, **kwargs)
    return geocode(records, **kwargs)


def _coverage_bytes(cfg, records, unit=None) -> bytes:
    c = cfg["coverage"]
    lat, lng = cfg["columns"]["lat"], cfg["columns"]["lng"]
    unit = unit or c["unit"]
    if unit == "locations":
        report = percent_located_locations(records, lat, lng)
    elif unit == "disasters":
        report = percent_located_disasters(records, lat, lng, how=c["how"])
    else:
        raise ConfigurationError(f"unknown unit {unit!r}")
    return render_report(report, c["format"])


def _emit(data: bytes, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        ensure_parent(output).write_bytes(data)


def cmd_ingest(cfg, args):
    records, meta = read_emdat(_need(cfg, "input"), with_metadata=True)
    write_csv(records, ensure_parent(_need(cfg, "output")))
    if getattr(args, "metadata_out", None):
        payload = meta.to_dict() if meta is not None else {}
        _emit((json.dumps(payload, indent=2, sort_keys=True) + "\n").encode(), args.metadata_out)


def cmd_locationize(cfg, args):
    records = _load_records(_need(cfg, "input"))
    write_csv(_locationize(cfg, records), ensure_parent(_need(cfg, "output")))


def cmd_coverage(cfg, args):
    records = _load_records(_need(cfg, "input"))
    _emit(_coverage_bytes(cfg, records), cfg.get("output"))


def cmd_geocode(cfg, args):
    records = read_table(_need(cfg, "input"))
    write_csv(_geocode(cfg, records), ensure_parent(_need(cfg, "output")))


def cmd_filter_box(cfg, args):
    box_cfg = cfg["box"]
    if not box_cfg["top_left"] or not box_cfg["bottom_right"]:
        raise ConfigurationError("filter-box needs --top-left and --bottom-right")
    box = BoundingBox.from_corners(*box_cfg["top_left"], *box_cfg["bottom_right"])
    records = read_table(_need(cfg, "input"))
    out = located_in_box(records, box, cfg["columns"]["lat"], cfg["columns"]["lng"])
    write_csv(out, ensure_parent(_need(cfg, "output")))


def cmd_filter_shape(cfg, args):
    if not cfg["region"]:
        raise ConfigurationError("filter-shape needs --region")
    records = read_table(_need(cfg, "input"))
    out = located_in_shapefile(records, region_file=cfg["region"],
                               lat_column=cfg["columns"]["lat"], lng_column=cfg["columns"]["lng"])
    write_csv(out, ensure_parent(_need(cfg, "output")))


def cmd_pipeline(cfg, args):
    outdir = Path(_need(cfg, "output"))
    outdir.mkdir(parents=True, exist_ok=True)
    records = read_emdat(_need(cfg, "input"))
    pairs = _locationize(cfg, records)
    write_csv(pairs, outdir / "locationized.csv")
    geocoded = _geocode(cfg, pairs)
    write_csv(geocoded, outdir / "geocoded.csv")
    ext = {"text": "txt", "json": "json", "svg": "svg"}.get(cfg["coverage"]["format"], "txt")
    reloaded = read_table(outdir / "geocoded.csv")
    for unit in ("locations", "disasters"):
        (outdir / f"coverage_{unit}.{ext}").write_bytes(_coverage_bytes(cfg, reloaded, unit))
    (outdir / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")


COMMANDS = {
    "ingest": cmd_ingest,
    "locationize": cmd_locationize,
    "coverage": cmd_coverage,
    "geocode": cmd_geocode,
    "filter-box": cmd_filter_box,
    "filter-shape": cmd_filter_shape,
    "pipeline": cmd_pipeline,
}


def _add_io(p, output_help="output CSV"):
    p.add_argument("input", nargs="?", help="input CSV")
    p.add_argument("output", nargs="?", help=output_help)


def _add_columns(p):
    p.add_argument("--lat-col", help="latitude column (default: lat)")
    p.add_argument("--lng-col", help="longitude column (default: lng)")


def _add_split(p):
    p.add_argument("--column", help="location column (default: Location)")
    p.add_argument("--joiner", action="append", help="extra delimiter regex (repeatable)")
    p.add_argument("--dummy-word", action="append", help="extra dummy word (repeatable)")
    p.add_argument("--replace-defaults", action="store_true", default=None,
                   help="use only the given joiners/dummy words")
    p.add_argument("--dedupe", action="store_true", default=None,
                   help="drop repeated words within one disaster")


def _add_geocode(p):
    p.add_argument("--batch-size", type=int)
    p.add_argument("--wait-time", type=float, help="seconds between batches")
    p.add_argument("--n-results", type=int)
    p.add_argument("--unwrap", action="store_true", default=None)
    p.add_argument("--username", help="GeoNames username (default: $GEONAMES_USERNAME)")
    p.add_argument("--offline-fixtures", metavar="PATH",
                   help="serve GeoNames answers from recorded fixtures")
    p.add_argument("--cache-dir")
    p.add_argument("--base-url")
    p.add_argument("--hourly-budget", type=int)
    p.add_argument("--daily-budget", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-country-bias", action="store_true", default=None)


def _add_coverage(p):
    p.add_argument("--unit", choices=["locations", "disasters"])
    p.add_argument("--how", choices=["any", "all"])
    p.add_argument("--format", choices=["text", "json", "svg"])


def _add_global(p, default=None):
    # SUPPRESS on subcommands so a flag given before the subcommand is not reset
    p.add_argument("--config", default=default, help="JSON config (as written by --dump-config)")
    p.add_argument("--dump-config", default=default, metavar="PATH", help="write the resolved config")
    p.add_argument("--log-level", default="WARNING" if default is None else default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emdatgeo", description=__doc__.split("\n")[0])
    _add_global(parser)
    common = argparse.ArgumentParser(add_help=False)
    _add_global(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("ingest", help="load an EM-DAT export and write a clean CSV", parents=[common])
    _add_io(p)
    p.add_argument("--metadata-out", help="write the export's metadata block as JSON")

    p = sub.add_parser("locationize", help="one row per disaster-location pair", parents=[common])
    _add_io(p)
    _add_split(p)

    p = sub.add_parser("coverage", help="share of rows/disasters with coordinates", parents=[common])
    _add_io(p, "report file (default: stdout)")
    _add_coverage(p)
    _add_columns(p)

    p = sub.add_parser("geocode", help="look up coordinates on GeoNames", parents=[common])
    _add_io(p)
    _add_geocode(p)

    p = sub.add_parser("filter-box", help="append an in_box column", parents=[common])
    _add_io(p)
    p.add_argument("--top-left", type=_latlng, metavar="LAT,LNG")
    p.add_argument("--bottom-right", type=_latlng, metavar="LAT,LNG")
    _add_columns(p)

    p = sub.add_parser("filter-shape", help="append an in_shape column", parents=[common])
    _add_io(p)
    p.add_argument("--region", help="GeoJSON (or .shp) region file")
    _add_columns(p)

    p = sub.add_parser("pipeline", help="locationize, geocode and report coverage", parents=[common])
    _add_io(p, "output directory")
    _add_split(p)
    _add_geocode(p)
    _add_coverage(p)
    return parser


def _diagnostic(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update({k: v for k, v in extra.items() if v is not None})
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            ensure_parent(args.dump_config).write_text(
                json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        COMMANDS[cfg["command"]](cfg, args)
    except QuotaExhaustedError as exc:
        _diagnostic(exc.kind, str(exc), resume_index=exc.resume_index)
        return EXIT_CODES["quota"]
    except EmdatGeoError as exc:
        _diagnostic(exc.kind, str(exc))
        return EXIT_CODES.get(exc.kind, 1)
    except OSError as exc:
        _diagnostic("io", str(exc))
        return EXIT_CODES["io"]
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
