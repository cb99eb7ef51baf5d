"""Generate the bundled honey production CSV.

Synthetic data in the public honey-production format: one row per
(state, year), years 1998-2012, 18 states. Values follow smooth per-state
trends with seeded noise so forecasts and anomaly scans behave sensibly.
Alabama 2010 priceperlb is pinned to 2.40 (the ground-truth lookup used
throughout the test suite), and two deliberate production spikes are
injected so anomaly queries have something to find.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "asktable" / "data" / "honey.csv"

STATES = [
    ("Alabama", 16000, 71, 0.65),
    ("Arizona", 36000, 55, 0.72),
    ("California", 420000, 60, 0.90),
    ("Colorado", 27000, 58, 0.80),
    ("Florida", 220000, 73, 0.78),
    ("Georgia", 70000, 54, 0.70),
    ("Illinois", 9000, 62, 1.05),
    ("Iowa", 38000, 66, 0.95),
    ("Michigan", 72000, 64, 0.88),
    ("Minnesota", 130000, 74, 0.82),
    ("Montana", 140000, 77, 0.76),
    ("North Dakota", 320000, 85, 0.70),
    ("New York", 60000, 63, 1.00),
    ("Oregon", 48000, 45, 0.92),
    ("Texas", 100000, 70, 0.74),
    ("Utah", 26000, 50, 0.85),
    ("Wisconsin", 64000, 72, 0.90),
    ("Wyoming", 38000, 60, 0.78),
]

YEARS = list(range(1998, 2013))


def main() -> None:
    rng = random.Random(20120229)
    rows = []
    for name, base_col, base_yield, base_price in STATES:
        # colonies drift slowly; price climbs over the period
        col_drift = rng.uniform(-0.015, 0.02)
        price_growth = rng.uniform(0.055, 0.09)
        for i, year in enumerate(YEARS):
            numcol = base_col * (1 + col_drift * i) * rng.uniform(0.93, 1.07)
            numcol = max(1000.0, round(numcol, -2))
            ypc = base_yield * rng.uniform(0.85, 1.15)
            yieldpercol = round(ypc, 0)
            totalprod = round(numcol * yieldpercol, 0)
            stocks = round(totalprod * rng.uniform(0.15, 0.45), 0)
            price = base_price * (1 + price_growth) ** i * rng.uniform(0.94, 1.06)
            priceperlb = round(price, 2)
            rows.append([name, numcol, yieldpercol, totalprod, stocks, priceperlb, 0.0, year])

    by_key = {(r[0], r[7]): r for r in rows}
    # pin the ground-truth lookup value
    by_key[("Alabama", 2010)][5] = 2.40
    # production spikes for anomaly queries (row-local, > 3 sigma in-state)
    by_key[("Georgia", 2006)][3] = round(by_key[("Georgia", 2006)][3] * 3.4, 0)
    by_key[("Utah", 2009)][3] = round(by_key[("Utah", 2009)][3] * 0.12, 0)
    by_key[("Illinois", 2011)][5] = round(by_key[("Illinois", 2011)][5] * 2.6, 2)

    for r in rows:
        r[6] = round(r[3] * r[5], 0)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["state", "numcol", "yieldpercol", "totalprod", "stocks", "priceperlb", "prodvalue", "year"]
        )
        for r in rows:
            writer.writerow(r)
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
