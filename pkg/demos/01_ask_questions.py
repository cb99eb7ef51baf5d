# Ask plain-English questions over the bundled honey production table.
#
# The engine annotates the request, compiles it into a typed operation
# graph, executes the graph, and recommends how to visualize the answer.

from asktable import Engine, EngineConfig
from asktable.cli import render_answer

engine = Engine(EngineConfig(reference_year=2020))

questions = [
    "What was the price of honey in Alabama in 2010?",
    "Top 5 states by honey production in 2011",
    "How many years had a price above 2 dollars in Alabama?",
    "Compare the average price of honey in Alabama and Georgia in 2010",
]

for question in questions:
    print("=" * 72)
    print("Q:", question)
    result = engine.query(question)
    print(render_answer(result.answer, result.viz))
    print()
