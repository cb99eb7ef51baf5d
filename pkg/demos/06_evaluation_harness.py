# Run the bundled request corpus (40 base requests x 4 phrasing variants,
# half simple / half complex) through the full pipeline and print the
# metric report: per-variant accuracy, top-1/top-3 visualization accuracy,
# macro-recall, and the ZeroR / compatibility-rule baselines.

from asktable import Engine, EngineConfig
from asktable.evaluate import bundled_corpus_path, evaluate

engine = Engine(EngineConfig(reference_year=2020))
report = evaluate(bundled_corpus_path(), engine, top_n=3)
print(report.render_table())

failures = [o for o in report.outcomes if not o.result_correct]
print(f"\nfailed variants: {len(failures)}")
for outcome in failures[:10]:
    print(f"  {outcome.record_id}.v{outcome.variant_index + 1}: {outcome.text!r}")
