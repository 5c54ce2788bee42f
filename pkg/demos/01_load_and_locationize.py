"""Load the bundled sample export and split its Location column into words."""
from emdatgeo import read_emdat, split_locations
from emdatgeo.datasets import sample_path

records = read_emdat(sample_path())
print(len(records), "disasters")
for r in records:
    print(r.dis_no, r.country, repr(r.location_string[:60]))

# one row per (disaster, location word)
pairs = split_locations(records)
print(len(pairs), "pairs")
for p in pairs:
    flag = "?" if p.uncertain_location_specificity else " "
    print(f"{p.dis_no:16} {flag} {p.location_word}")

# extra delimiters and dummy words stack on top of the defaults
custom = split_locations(records, joiner_regex=[r"\bor\b"], dummy_words=["peninsula"])
print(sorted({p.location_word for p in custom if p.dis_no.endswith("CAN")}))
