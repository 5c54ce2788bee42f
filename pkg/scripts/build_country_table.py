"""Regenerate ``src/emdatgeo/data/iso3166.csv`` from pycountry.

Only needed when refreshing the bundled table; the package itself never
imports pycountry.
"""
import csv
from pathlib import Path

import pycountry

OUT = Path(__file__).resolve().parents[1] / "src" / "emdatgeo" / "data" / "iso3166.csv"


def main():
    rows = []
    for c in pycountry.countries:
        names = [c.name]
        for attr in ("official_name", "common_name"):
            value = getattr(c, attr, None)
            if value and value not in names:
                names.append(value)
        for name in names:
            rows.append((name, c.alpha_2))
    rows.sort()
    with OUT.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "alpha_2"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} names to {OUT}")


if __name__ == "__main__":
    main()
