"""Batch evaluation: corpus parsing, result matching, and metrics.

The harness runs every request variant through the pipeline, scores
result correctness against the record's expectation, and evaluates the
visualization ranking only on correct results. Alongside the kNN
recommender it reports two baselines: ZeroR (always the most frequent
labels) and a deterministic compatibility-rule ranking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Engine
from .errors import CorpusError
from .values import KIND_NAMES, Value
from .viz import VIZ_TYPES, compatible, zeror_topn

CLASSES = ("simple", "complex")


def round_sig(x: float, sig: int = 6) -> float:
    """Round to `sig` significant digits (the harness comparison grain)."""
    if x == 0 or not math.isfinite(x):
        return float(x)
    return round(x, -int(math.floor(math.log10(abs(x)))) + (sig - 1))


@dataclass
class RequestRecord:
    id: str
    request_class: str
    variants: list[str]
    expected_result: dict
    expected_viz: list[str]
    notes: str = ""

    @property
    def kind_only(self) -> bool:
        keys = set(self.expected_result) - {"kind", "tolerance"}
        return not keys


def load_corpus(path: str | Path) -> list[RequestRecord]:
    records = []
    seen_ids = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"invalid JSON: {e.msg}", lineno) from None
        try:
            record = RequestRecord(
                id=raw["id"],
                request_class=raw["class"],
                variants=list(raw["variants"]),
                expected_result=dict(raw["expected_result"]),
                expected_viz=list(raw["expected_viz"]),
                notes=raw.get("notes", ""),
            )
        except KeyError as e:
            raise CorpusError(f"missing field {e}", lineno) from None
        if record.request_class not in CLASSES:
            raise CorpusError(f"unknown class {record.request_class!r}", lineno)
        if len(record.variants) != 4:
            raise CorpusError(
                f"expected exactly 4 variants, got {len(record.variants)}", lineno
            )
        if record.expected_result.get("kind") not in KIND_NAMES:
            raise CorpusError(
                f"unknown result kind {record.expected_result.get('kind')!r}", lineno
            )
        for viz in record.expected_viz:
            if viz not in VIZ_TYPES:
                raise CorpusError(f"unknown viz type {viz!r}", lineno)
        if record.id in seen_ids:
            raise CorpusError(f"duplicate record id {record.id!r}", lineno)
        seen_ids.add(record.id)
        records.append(record)
    return records


def _norm_cell(cell) -> object:
    if isinstance(cell, bool):
        return str(cell)
    if isinstance(cell, (int, float)):
        return round_sig(float(cell))
    return str(cell)


def result_matches(expected: dict, answer: Value) -> bool:
    """Correctness: kind must match; values within the record's tolerance.

    Scalars compare absolutely against the stated tolerance (default:
    1e-6 relative). Series and tables compare as multisets of rows after
    rounding to 6 significant digits. Kind-only records match on kind.
    """
    kind = expected["kind"]
    if answer.kind != kind:
        return False
    payload = set(expected) - {"kind", "tolerance"}
    if not payload:
        return True
    if kind == "scalar":
        target = float(expected["value"])
        tol = expected.get("tolerance")
        if tol is None:
            tol = max(1e-6 * abs(target), 1e-9)
        return abs(answer.value - target) <= tol
    if kind in ("series", "geo_series"):
        got = sorted((str(p[0]), round_sig(float(p[1]))) for p in answer.points)
        want = sorted((str(p[0]), round_sig(float(p[1]))) for p in expected["points"])
        return got == want
    if kind == "table":
        got = sorted(tuple(_norm_cell(c) for c in r) for r in answer.rows)
        want = sorted(tuple(_norm_cell(c) for c in r) for r in expected["rows"])
        return got == want
    if kind == "text":
        return str(answer.text).lower() == str(expected["text"]).lower()
    if kind == "boolean":
        return answer.flag == bool(expected["flag"])
    return True


def compat_rule_ranking(kind: str, matrix: dict[str, list[str]], n: int) -> list[str]:
    """Deterministic baseline: compatible types in the fixed order."""
    return [v for v in VIZ_TYPES if kind in matrix.get(v, [])][:n]


@dataclass
class VariantOutcome:
    record_id: str
    variant_index: int
    text: str
    result_correct: bool
    answer_kind: str | None = None
    error: str | None = None
    viz_ranking: list[str] = field(default_factory=list)
    viz_top1_hit: bool | None = None
    viz_topn_hit: bool | None = None


@dataclass
class EvalReport:
    top_n: int
    per_class: dict = field(default_factory=dict)
    viz: dict = field(default_factory=dict)
    baselines: dict = field(default_factory=dict)
    outcomes: list[VariantOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "top_n": self.top_n,
            "per_class": self.per_class,
            "viz": self.viz,
            "baselines": self.baselines,
            "outcomes": [
                {
                    "record_id": o.record_id,
                    "variant_index": o.variant_index,
                    "text": o.text,
                    "result_correct": o.result_correct,
                    "answer_kind": o.answer_kind,
                    "error": o.error,
                    "viz_ranking": o.viz_ranking,
                    "viz_top1_hit": o.viz_top1_hit,
                    "viz_topn_hit": o.viz_topn_hit,
                }
                for o in self.outcomes
            ],
        }

    def render_table(self) -> str:
        lines = []
        lines.append(f"{'class':<10} {'records':>8} {'variants':>9} "
                     f"{'variant acc':>12} {'base acc':>9} {'all-4 acc':>10}")
        for cls in CLASSES:
            row = self.per_class.get(cls)
            if not row:
                continue
            lines.append(
                f"{cls:<10} {row['records']:>8} {row['variants']:>9} "
                f"{row['variant_accuracy']:>12.3f} {row['base_accuracy']:>9.3f} "
                f"{row['all_variants_accuracy']:>10.3f}"
            )
        v = self.viz
        if v:
            lines.append("")
            lines.append(f"viz (on {v['evaluated']} correct results): "
                         f"top1 {v['top1_accuracy']:.3f}  top{self.top_n} "
                         f"{v['topn_accuracy']:.3f}  macro-recall {v['macro_recall']:.3f}")
        for name, row in self.baselines.items():
            lines.append(f"baseline {name:<12} top1 {row['top1_accuracy']:.3f}  "
                         f"top{self.top_n} {row['topn_accuracy']:.3f}")
        return "\n".join(lines)


def evaluate(corpus_path: str | Path, engine: Engine, top_n: int = 3) -> EvalReport:
    """Run the corpus through the engine and assemble the metric report."""
    records = load_corpus(corpus_path)
    report = EvalReport(top_n=top_n)

    evaluated_labels: list[list[str]] = []  # expected labels per evaluated case
    evaluated_rankings: list[list[str]] = []
    evaluated_kinds: list[str] = []

    per_class: dict[str, dict] = {
        cls: {"records": 0, "variants": 0, "variant_correct": 0,
              "base_correct": 0, "all_variants_correct": 0}
        for cls in CLASSES
    }

    for record in records:
        stats = per_class[record.request_class]
        stats["records"] += 1
        variant_flags = []
        for vi, text in enumerate(record.variants):
            stats["variants"] += 1
            outcome = VariantOutcome(record.id, vi, text, False)
            try:
                result = engine.query(text)
                outcome.answer_kind = result.answer.kind
                outcome.result_correct = result_matches(record.expected_result, result.answer)
            except Exception as e:  # any pipeline failure counts as incorrect
                outcome.error = f"{type(e).__name__}: {e}"
            variant_flags.append(outcome.result_correct)
            if outcome.result_correct:
                stats["variant_correct"] += 1
                if vi == 0:
                    stats["base_correct"] += 1
                ranking = [v for v, _ in result.viz.ranking][:top_n]
                outcome.viz_ranking = ranking
                outcome.viz_top1_hit = ranking[:1] != [] and ranking[0] in record.expected_viz
                outcome.viz_topn_hit = any(v in record.expected_viz for v in ranking)
                evaluated_labels.append(record.expected_viz)
                evaluated_rankings.append(ranking)
                evaluated_kinds.append(result.answer.kind)
            report.outcomes.append(outcome)
        if all(variant_flags):
            stats["all_variants_correct"] += 1

    for cls, stats in per_class.items():
        n_var, n_rec = stats["variants"], stats["records"]
        report.per_class[cls] = {
            "records": n_rec,
            "variants": n_var,
            "variant_accuracy": stats["variant_correct"] / n_var if n_var else 0.0,
            "base_accuracy": stats["base_correct"] / n_rec if n_rec else 0.0,
            "all_variants_accuracy": stats["all_variants_correct"] / n_rec if n_rec else 0.0,
        }

    n_eval = len(evaluated_labels)
    if n_eval:
        top1 = sum(1 for lbls, rk in zip(evaluated_labels, evaluated_rankings)
                   if rk and rk[0] in lbls)
        topn = sum(1 for lbls, rk in zip(evaluated_labels, evaluated_rankings)
                   if any(v in lbls for v in rk))
        # macro-recall over viz types: for each type, the fraction of cases
        # whose primary label is that type where it appeared in the top-N
        recalls = {}
        for viz_type in VIZ_TYPES:
            cases = [rk for lbls, rk in zip(evaluated_labels, evaluated_rankings)
                     if lbls[0] == viz_type]
            if cases:
                recalls[viz_type] = sum(1 for rk in cases if viz_type in rk) / len(cases)
        report.viz = {
            "evaluated": n_eval,
            "top1_accuracy": top1 / n_eval,
            "topn_accuracy": topn / n_eval,
            "recall_per_type": recalls,
            "macro_recall": sum(recalls.values()) / len(recalls) if recalls else 0.0,
        }

        primary = [lbls[0] for lbls in evaluated_labels]
        z_top1 = zeror_topn(primary, 1)
        z_topn = zeror_topn(primary, top_n)
        report.baselines["zeror"] = {
            "top1_accuracy": sum(1 for lbls in evaluated_labels if z_top1[0] in lbls) / n_eval,
            "topn_accuracy": sum(1 for lbls in evaluated_labels
                                 if any(v in lbls for v in z_topn)) / n_eval,
            "prediction": z_topn,
        }
        c_top1 = c_topn = 0
        for lbls, kind in zip(evaluated_labels, evaluated_kinds):
            ranking = compat_rule_ranking(kind, engine.compat, top_n)
            if ranking and ranking[0] in lbls:
                c_top1 += 1
            if any(v in lbls for v in ranking):
                c_topn += 1
        report.baselines["compat-rule"] = {
            "top1_accuracy": c_top1 / n_eval,
            "topn_accuracy": c_topn / n_eval,
        }
    return report


def bundled_corpus_path() -> Path:
    return Path(__file__).parent / "data" / "corpus.jsonl"
