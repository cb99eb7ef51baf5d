# Step-back exploration: walk from the answer back through the executed
# graph and overlay intermediate results with the final answer.

from asktable import Engine, EngineConfig
from asktable.explore import SessionStore, step_back

engine = Engine(EngineConfig(reference_year=2020))
store = SessionStore()
session = store.create()

result = engine.query(
    "What was the average price of honey in Alabama?", session=session, store=store
)
print("answer:", result.answer.value, result.answer.unit)
print("graph:", " -> ".join(n.function for n in result.graph.nodes))

# one step back from the mean: the underlying yearly values, overlaid
# with a reference line at the answer
node_id, value, spec = step_back(session, result.graph_id, 1, engine.viz_model)
print(f"\n[{node_id}] {value.kind} with {len(value.points)} points")
print("overlay:", spec.viz_type, "reference_line =", spec.binding.get("reference_line"))

# keep walking: the filtered table feeding the projection
node_id, value, spec = step_back(session, result.graph_id, 1, engine.viz_model)
print(f"\n[{node_id}] {value.kind} with {len(value.rows)} rows")
print("stacked specs:", [s.viz_type for s in spec.stacked] or "none")
