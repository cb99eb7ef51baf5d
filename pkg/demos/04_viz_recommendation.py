# Data-adaptive and user-adaptive visualization recommendation.
#
# A kNN model over historical (result features, chosen visualization)
# examples votes for the top-3 forms; an explicit "as a table" style
# request pins its form to rank 1 when compatible.

from asktable import Engine, EngineConfig

engine = Engine(EngineConfig(reference_year=2020))

requests = [
    "What was the price of honey in Alabama in 2010?",          # scalar
    "Honey production per state in 2010",                        # geo series
    "California honey prices by year",                           # temporal series
    "What was the price of honey in Alabama in 2010, as a table?",  # pinned
    "Honey production per state in 2010 on a map",               # pinned geo
]

for text in requests:
    result = engine.query(text)
    ranking = ", ".join(f"{v}({n})" for v, n in result.viz.ranking)
    print(f"{text}\n  kind={result.answer.kind:<12} top-3: {ranking}")
    for note in result.diagnostics:
        print(f"  note: {note}")
    print()

# an incompatible wish is ignored with a diagnostic
result = engine.query("What was the price of honey in Alabama in 2010, on a map?")
print("incompatible modality ->", result.viz.ranking[0][0])
print("diagnostics:", result.diagnostics)
