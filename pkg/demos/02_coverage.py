"""How many rows and disasters already carry coordinates in the export itself."""
from emdatgeo import percent_located_disasters, percent_located_locations, read_emdat, split_locations
from emdatgeo.coverage import DisasterAggregation, render_report
from emdatgeo.datasets import sample_path

pairs = split_locations(read_emdat(sample_path()))

loc = percent_located_locations(pairs, lat_column="Latitude", lng_column="Longitude")
print(render_report(loc, "text").decode())

for how in ("any", "all"):
    rep = percent_located_disasters(pairs, lat_column="Latitude", lng_column="Longitude", how=how)
    print(how, rep.located, "/", rep.total, rep.percent_located_text + "%")

# a custom rule: at least half the pairs of a disaster are located
half = DisasterAggregation.custom(lambda flags: 2 * sum(flags) >= len(flags), name="half")
rep = percent_located_disasters(pairs, lat_column="Latitude", lng_column="Longitude", how=half)
print("half", rep.percent_located_text + "%")

print(render_report(rep, "json").decode())
