"""Generate the bundled word-vector file.

No pretrained vectors are fetchable in the build sandbox, so the bundled
file is synthesized with cluster geometry: every concept gets a random
base direction, members get the base plus small noise (pairwise cosine
~0.85 within a cluster), and unrelated words get independent random
directions (|cosine| well below the matching threshold in 50 dims).
The file format and replaceability match a real embedding subset.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "asktable" / "data" / "embeddings.txt"

DIM = 50
# per-component noise scale; total noise norm ~0.45 of the unit base,
# giving within-cluster cosines around 0.8
NOISE = 0.45 / DIM**0.5

CLUSTERS = {
    "price": ["price", "prices", "cost", "costs", "worth", "pricing", "priced", "expensive", "cheap"],
    "average": ["average", "mean", "typical", "avg", "median", "usual", "normal"],
    "total": ["total", "sum", "overall", "altogether", "combined", "cumulative", "entire"],
    "maximum": ["maximum", "max", "peak", "top", "highest", "largest", "biggest", "greatest", "record"],
    "minimum": ["minimum", "min", "lowest", "smallest", "least", "fewest", "bottom"],
    "count": ["count", "many", "number", "quantity", "tally"],
    "forecast": ["forecast", "forecasts", "predict", "predicted", "prediction", "predictions",
                 "future", "develop", "development", "trend", "projection", "outlook",
                 "anticipate", "expect", "expected", "foresee", "extrapolate", "prognosis",
                 "evolve", "estimate", "upcoming", "ahead"],
    "anomaly": ["anomaly", "anomalies", "anomalous", "outlier", "outliers", "unusual",
                "abnormal", "irregular", "irregularities", "spike", "spikes", "deviation",
                "deviations", "odd", "strange", "weird", "aberration", "aberrations",
                "glitch", "oddity", "suspicious"],
    "compare": ["compare", "comparison", "difference", "versus", "contrast", "gap", "delta",
                "differ", "relative", "against"],
    "production": ["production", "output", "produce", "produced", "harvest", "generated",
                   "manufactured", "volume", "supply"],
    "filter": ["filter", "only", "restrict", "limit", "narrow"],
    "group": ["breakdown", "distribution", "grouped", "per", "split", "segmented"],
    "state": ["state", "states", "region", "regions", "place", "location", "area", "territory"],
    "year": ["year", "years", "when", "time", "annual", "yearly", "period"],
    "colony": ["colony", "colonies", "hive", "hives", "beehive", "beehives", "swarm", "apiary"],
    "stock": ["stock", "stocks", "inventory", "inventories", "reserve", "reserves", "stockpile"],
    "value": ["value", "values", "revenue", "proceeds", "earnings"],
    "honey": ["honey", "nectar", "bees", "beeswax"],
    "yield": ["yield", "yields", "productivity", "efficiency"],
}

# unrelated filler so OOV-adjacent lookups behave like a real vocabulary
FILLER = """
purple green blue red yellow orange black white pink brown silver golden
dog cat horse bird fish cow sheep goat lion tiger bear wolf fox deer
house door window roof floor wall garden street road bridge tower castle
apple banana cherry grape lemon mango peach pear plum berry melon
run walk jump swim fly drive ride climb dance sing read write draw paint
happy sad angry calm proud brave shy tired hungry thirsty sleepy awake
river mountain valley forest desert ocean island beach cloud storm rain snow
music piano guitar violin drum trumpet flute song melody rhythm harmony
doctor teacher lawyer farmer baker driver pilot sailor soldier artist poet
monday tuesday wednesday thursday friday saturday sunday january february
march april june july august september october november december spring
summer autumn winter morning evening night noon midnight breakfast dinner
chair sofa desk lamp shelf carpet mirror clock vase candle basket
shirt coat hat glove scarf boot shoe sock dress skirt belt button
bread cheese butter milk egg sugar salt pepper flour rice pasta soup
engine wheel brake gear motor battery cable wire switch bulb fuse
paper pencil eraser ruler scissors glue tape stapler folder envelope stamp
coffee tea juice water soda wine beer cocoa lemonade cider
soccer tennis golf hockey rugby cricket boxing cycling rowing skiing
london paris berlin madrid rome vienna prague dublin lisbon warsaw
happiness sadness courage wisdom honesty loyalty patience kindness humor
triangle circle square rectangle hexagon sphere cube cone pyramid prism
copper iron steel bronze marble granite crystal diamond ruby emerald
whisper shout murmur giggle laughter scream sigh groan cheer applause
""".split()


def main() -> None:
    rng = np.random.default_rng(77)
    vectors: dict[str, np.ndarray] = {}
    for members in CLUSTERS.values():
        base = rng.standard_normal(DIM)
        base /= np.linalg.norm(base)
        for word in members:
            if word in vectors:
                continue
            v = base + NOISE * rng.standard_normal(DIM)
            vectors[word] = v / np.linalg.norm(v)
    for word in FILLER:
        if word in vectors:
            continue
        v = rng.standard_normal(DIM)
        vectors[word] = v / np.linalg.norm(v)

    with OUT.open("w") as fh:
        for word, v in vectors.items():
            comps = " ".join(f"{x:.5f}" for x in v)
            fh.write(f"{word} {comps}\n")
    print(f"wrote {len(vectors)} vectors ({DIM}d) to {OUT}")

    def cos(a, b):
        return float(np.dot(vectors[a], vectors[b]))

    checks = [
        ("typical", "average"), ("cost", "price"), ("purple", "forecast"),
        ("generated", "production"), ("hive", "colony"), ("dog", "anomaly"),
    ]
    for a, b in checks:
        print(f"  cos({a}, {b}) = {cos(a, b):+.3f}")


if __name__ == "__main__":
    main()
