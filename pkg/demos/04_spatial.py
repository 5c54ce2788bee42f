"""Keep only locations inside a lat/lng box or a region outline."""
import numpy as np

from emdatgeo import (BoundingBox, GeoNamesConfig, GeoPoint, Polygon, PolygonSet, geocode,
                      load_region, located_in_box, located_in_shapefile, point_in_polygon,
                      read_emdat, split_locations)
from emdatgeo.datasets import california_path, geonames_fixtures_path, sample_path
from emdatgeo.spatial import contains_points

config = GeoNamesConfig(mode="offline-fixtures", fixtures=str(geonames_fixtures_path()))
geo = geocode(split_locations(read_emdat(sample_path())), config=config)

box = BoundingBox.from_corners(40, -119, 35, -75)   # top-left, bottom-right
for r in located_in_box(geo, box)[:6]:
    print(f"{r.location_word:16} in_box={r.get('in_box')}")

california = load_region(california_path())
for r in located_in_shapefile(geo, california)[:6]:
    print(f"{r.location_word:16} in_shape={r.get('in_shape')}")
print("Sacramento in California:", point_in_polygon(GeoPoint(38.58, -121.49), california))

# the test is vectorized over points; a square with a square hole
ring = [(0, 0), (10, 0), (10, 10), (0, 10)]
hole = [(4, 4), (6, 4), (6, 6), (4, 6)]
donut = PolygonSet([Polygon(ring, (hole,))])
lats = np.array([5.0, 2.0, 5.0, 12.0])
lngs = np.array([5.0, 2.0, 10.0, 5.0])
print(contains_points(donut, lats, lngs))   # hole, inside, on edge, outside
