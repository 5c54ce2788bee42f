"""Geocode the sample pairs against recorded GeoNames answers (no network).

For live lookups set GEONAMES_USERNAME and build ``GeoNamesConfig.from_env()``.
"""
from emdatgeo import (BatchPlan, GeoNamesClient, GeoNamesConfig, SimulatedClock, geocode,
                      geocode_batches, percent_located_disasters, percent_located_locations,
                      read_emdat, split_locations)
from emdatgeo.datasets import geonames_fixtures_path, sample_path

pairs = split_locations(read_emdat(sample_path()))
config = GeoNamesConfig(mode="offline-fixtures", fixtures=str(geonames_fixtures_path()))

geo = geocode(pairs, config=config)
for r in geo:
    where = f"{r.lat:9.5f} {r.lng:10.5f}" if r.point else "   (not found)"
    print(f"{r.location_word:22} {where}")

print("locations:", percent_located_locations(geo).percent_located_text + "%")
print("disasters:", percent_located_disasters(geo, how="any").percent_located_text + "%")

# batching with a simulated clock: the waits are recorded instead of slept
clock = SimulatedClock()
client = GeoNamesClient(config, clock=clock)
same = geocode_batches(pairs, BatchPlan(batch_size=5, wait_time=4800), client=client)
print("batched == plain:", same == geo, "| waits:", clock.sleeps)

# several candidates per word, spread into lat1/lng1... columns
wide = geocode(pairs[:3], n_results=2, unwrap=True, config=config)
print(list(wide[0]))
