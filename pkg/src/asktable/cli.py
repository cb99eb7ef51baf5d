"""Command line entry point: one-shot queries, a REPL, the evaluation
harness, and the service launcher.

Exit codes: 0 success, 1 engine/config failure, 2 unintelligible request.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import Engine, EngineConfig
from .errors import AskTableError, StepRangeError, UnintelligibleRequestError
from .evaluate import bundled_corpus_path, evaluate
from .explore import SessionStore, step_back
from .graph import to_wire, to_wire_json
from .values import Value
from .viz import VizSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asktable",
        description="Ask natural-language questions over a CSV table.",
    )
    parser.add_argument("text", nargs="*", help="one-shot request (omit for a REPL)")
    parser.add_argument("--dataset", help="CSV file (default: bundled honey data)")
    parser.add_argument("--schema", help="schema-override JSON for --dataset")
    parser.add_argument("--registry", help="registry manifest JSON (extends builtins)")
    parser.add_argument("--embeddings", help="word-vector file")
    parser.add_argument("--viz-model", help="visualization model JSON")
    parser.add_argument("--corpus", help="evaluation corpus (JSON Lines)")
    parser.add_argument("--eval", action="store_true", help="run the evaluation harness")
    parser.add_argument("--serve", action="store_true", help="run the HTTP service")
    parser.add_argument("--port", type=int, help="service port")
    parser.add_argument("--reference-year", type=int, help="anchor for relative years")
    parser.add_argument("--top-n", type=int, default=3, help="ranking depth for eval")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized demos")
    parser.add_argument("--report", help="write the eval report (JSON) here")
    parser.add_argument("--config", help="engine config file (JSON)")
    return parser


def config_from_args(args: argparse.Namespace) -> EngineConfig:
    config = EngineConfig.from_sources(args.config)
    if args.dataset:
        config.dataset_path = args.dataset
        config.schema_path = args.schema
    if args.registry:
        config.registry_manifest = args.registry
    if args.embeddings:
        config.embeddings_path = args.embeddings
    if args.viz_model:
        config.viz_model_path = args.viz_model
    if args.reference_year is not None:
        config.reference_year = args.reference_year
    if args.port is not None:
        config.port = args.port
    return config


# ----------------------------------------------------------------------
# ASCII rendering
# ----------------------------------------------------------------------


def render_table(value: Value, limit: int = 20) -> str:
    headers = [c.name for c in value.schema]
    rows = [[_fmt(cell) for cell in row] for row in value.rows[:limit]]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    sep = "  "
    lines = [sep.join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append(sep.join("-" * w for w in widths))
    for row in rows:
        lines.append(sep.join(c.rjust(w) for c, w in zip(row, widths)))
    if len(value.rows) > limit:
        lines.append(f"... ({len(value.rows) - limit} more rows)")
    return "\n".join(lines)


def render_bars(value: Value, width: int = 40) -> str:
    if not value.points:
        return "(empty series)"
    labels = [str(p[0]) for p in value.points]
    numbers = [float(p[1]) for p in value.points]
    label_w = max(len(l) for l in labels)
    peak = max(abs(n) for n in numbers) or 1.0
    lines = []
    for label, n in zip(labels, numbers):
        bar = "#" * max(1, int(abs(n) / peak * width)) if n else ""
        lines.append(f"{label.rjust(label_w)} | {bar} {_fmt(n)}")
    if value.unit:
        lines.append(f"({value.unit})")
    return "\n".join(lines)


def _fmt(cell) -> str:
    if isinstance(cell, float):
        if cell == int(cell) and abs(cell) < 1e15:
            return str(int(cell))
        return f"{cell:,.4g}"
    return str(cell)


def render_answer(value: Value, spec: VizSpec) -> str:
    lines = []
    if value.kind == "scalar":
        unit = f" {value.unit}" if value.unit else ""
        lines.append(f"answer: {_fmt(value.value)}{unit}")
    elif value.kind == "text":
        lines.append(f"answer: {value.text}")
    elif value.kind == "boolean":
        lines.append(f"answer: {'yes' if value.flag else 'no'}")
    else:
        lines.append(f"answer ({value.kind}):")
    if spec.viz_type == "table_view" and value.kind == "table":
        lines.append(render_table(value))
    elif spec.viz_type == "bar_chart" and value.kind in ("series", "geo_series"):
        lines.append(render_bars(value))
    elif value.kind == "table":
        lines.append(render_table(value))
    elif value.kind in ("series", "geo_series"):
        lines.append(render_bars(value))
    elif value.kind == "forecast":
        lines.append(render_bars(value.history))
        for label, predicted, stderr in value.predicted:
            lines.append(f"{label} -> predicted {_fmt(predicted)} (stderr {_fmt(stderr)})")
    elif value.kind == "anomaly_report":
        flagged = {value.series.points[i][0] for i in value.flagged}
        lines.append(render_bars(value.series))
        lines.append(
            f"flagged: {sorted(map(str, flagged)) or 'none'} (threshold {value.threshold})"
        )
    if spec.viz_type not in ("table_view", "bar_chart"):
        lines.append(f"viz spec: {json.dumps(spec.to_dict(), sort_keys=True)}")
    ranking = ", ".join(f"{v} ({n})" for v, n in spec.ranking)
    lines.append(f"top-3 viz: {ranking}")
    for d in spec.diagnostics:
        lines.append(f"note: {d}")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# modes
# ----------------------------------------------------------------------


def run_query(engine: Engine, text: str) -> int:
    try:
        result = engine.query(text)
    except UnintelligibleRequestError as e:
        print(f"could not understand the request: {e}", file=sys.stderr)
        if e.diagnostics:
            print(json.dumps(e.diagnostics, indent=2), file=sys.stderr)
        return 2
    print(render_answer(result.answer, result.viz))
    return 0


def run_eval(engine: Engine, args: argparse.Namespace) -> int:
    corpus = args.corpus or bundled_corpus_path()
    report = evaluate(corpus, engine, top_n=args.top_n)
    print(report.render_table())
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
        print(f"\nreport written to {args.report}")
    return 0


def run_repl(engine: Engine) -> int:
    print(f"asktable REPL over {engine.dataset.name!r} "
          f"({len(engine.dataset.rows)} rows). Commands: :back N, :graph, :top3, :quit")
    store = SessionStore(ttl_seconds=engine.config.session_ttl)
    session = store.create()
    last = None
    while True:
        try:
            line = input("? ").strip()
        except (EOFError, KeyboardInterrupt):
            print()
            return 0
        if not line:
            continue
        if line in (":quit", ":q", ":exit"):
            return 0
        if line.startswith(":"):
            if last is None:
                print("ask something first")
                continue
            if line.startswith(":back"):
                parts = line.split()
                steps = int(parts[1]) if len(parts) > 1 else 1
                try:
                    node_id, value, spec = step_back(
                        session, last.graph_id, steps, engine.viz_model
                    )
                except StepRangeError as e:
                    print(f"out of range: {e}")
                    continue
                print(f"[{node_id}]")
                print(render_answer(value, spec))
            elif line == ":graph":
                print(to_wire_json(last.graph))
            elif line == ":top3":
                for v, n in last.viz.ranking:
                    print(f"{v} ({n} votes)")
            else:
                print(f"unknown command {line}")
            continue
        try:
            last = engine.query(line, session=session, store=store)
        except UnintelligibleRequestError as e:
            print(f"could not understand that: {e}")
            continue
        except AskTableError as e:
            print(f"error: {e}")
            continue
        print(render_answer(last.answer, last.viz))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except Exception as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    if args.serve:
        from .service import serve

        serve(config, port=args.port)
        return 0
    try:
        engine = Engine(config)
    except AskTableError as e:
        print(f"engine initialization failed: {e}", file=sys.stderr)
        return 1
    if args.eval:
        return run_eval(engine, args)
    if args.text:
        return run_query(engine, " ".join(args.text))
    return run_repl(engine)


if __name__ == "__main__":
    sys.exit(main())
