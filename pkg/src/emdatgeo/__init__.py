"""Geocoding and analysis of EM-DAT disaster exports.

Typical workflow::

    from emdatgeo import (read_emdat, split_locations, percent_located_locations,
                          geocode_batches, located_in_box, BoundingBox)

    records = read_emdat("emdat_public_export.csv")
    pairs = split_locations(records)
    percent_located_locations(pairs, "Latitude", "Longitude")
    geocoded = geocode_batches(pairs, config=GeoNamesConfig.from_env())
    located_in_box(geocoded, BoundingBox.from_corners(40, -119, 35, -75))
"""

from .countries import country_to_iso2
from .coverage import (
    ALL,
    ANY,
    CoverageReport,
    DisasterAggregation,
    percent_located_disasters,
    percent_located_locations,
    render_report,
)
from .errors import (
    ConfigurationError,
    EmdatGeoError,
    FormatError,
    GeoNamesError,
    QuotaExhaustedError,
    TransientServiceError,
    ValidationError,
)
from .geocoder import BatchPlan, geocode, geocode_batches
from .geonames import (
    GeoNamesClient,
    GeoNamesConfig,
    QuotaLimiter,
    SimulatedClock,
    acquire_quota,
)
from .ingest import EmdatMetadata, detect_header_block, parse_native_coordinate, read_emdat, write_emdat
from .locationizer import SplitConfig, default_split_config, split_locations
from .records import DisasterRecord, GeocodedRecord, GeocodeMatch, GeoPoint, LocationizedRecord
from .spatial import (
    BoundingBox,
    Polygon,
    PolygonSet,
    load_region,
    located_in_box,
    located_in_shapefile,
    point_in_polygon,
)
from .tables import read_table, write_csv

__version__ = "0.1.0"
