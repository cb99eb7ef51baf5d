# Look inside the compiler: how a request becomes an operation graph.
#
# A request is annotated into tokens + data anchors, matched against the
# function registry, and expanded into candidate graphs. Every edge is
# type-checked (a producer's output kind must fit the consumer's slot),
# and the ranked candidates compete on relevance = mean match score x
# token coverage.

import json

from asktable import Engine, EngineConfig
from asktable.annotate import annotate
from asktable.graph import select, to_wire

engine = Engine(EngineConfig(reference_year=2020))

text = "How will the average honey price develop in Florida next year?"
phrase = annotate(text, engine.dataset, engine.annotator_config)

print("request:", text)
print("\nanchors found:")
for anchor in phrase.anchors:
    token_text = " ".join(
        t.surface for t in phrase.tokens[anchor.first : anchor.last + 1]
    )
    print(f"  {anchor.kind:<9} {token_text!r:<20} ->",
          anchor.column or anchor.value or anchor.year or "(the table)")

candidates = engine.builder.build(phrase)
print(f"\n{len(candidates)} candidate graphs; ranked head:")
for graph in candidates[:3]:
    chain = " -> ".join(n.function for n in graph.nodes)
    print(f"  relevance={graph.relevance:.3f} complete={graph.complete}  {chain}")

winner = select(candidates)
print("\nselected graph document:")
print(json.dumps(to_wire(winner), indent=2))
