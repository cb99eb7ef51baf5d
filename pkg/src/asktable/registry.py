"""The predefined set of semantically annotated executable functions.

Each function carries a semantic description (weighted keywords, synonyms,
embedding terms) used to match request spans, a typed input signature,
parameter slots, a typed output, and the name of a built-in executor.
The registry answers two queries: which functions a span of text matches,
and which functions can produce a given value kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .embeddings import EmbeddingStore
from .values import ValueKind

DEFAULT_TAU_FN = 0.55

AGG_FNS = ("sum", "mean", "min", "max", "count")
FILTER_OPS = ("=", "<", ">", "<=", ">=", "between", "in")


@dataclass(frozen=True)
class Keyword:
    weight: float
    params: tuple = ()  # ((name, value), ...) implied parameter bindings

    @property
    def param_dict(self) -> dict:
        return dict(self.params)


def _kw(weight: float, **params) -> Keyword:
    return Keyword(weight, tuple(sorted(params.items())))


@dataclass(frozen=True)
class InputSlot:
    name: str
    kind: ValueKind
    required: bool = True


@dataclass(frozen=True)
class ParamSlot:
    name: str
    literal_kind: str  # column | int | float | string | agg_fn | filter_op | direction
    default: object = None


@dataclass
class FunctionSpec:
    id: str
    keywords: dict[str, Keyword]
    output: ValueKind
    executor_ref: str
    inputs: list[InputSlot] = field(default_factory=list)
    params: list[ParamSlot] = field(default_factory=list)
    synonyms: dict[str, str] = field(default_factory=dict)  # synonym -> keyword
    embedding_terms: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.keywords:
            raise ValueError(f"function {self.id!r}: keywords must be non-empty")
        for syn, kw in self.synonyms.items():
            if kw not in self.keywords:
                raise ValueError(
                    f"function {self.id!r}: synonym {syn!r} maps to unknown keyword {kw!r}"
                )

    @property
    def is_source(self) -> bool:
        return not self.inputs

    @property
    def required_inputs(self) -> list[InputSlot]:
        return [s for s in self.inputs if s.required]

    def param(self, name: str) -> ParamSlot:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class TermMatch:
    """One way a single term matched a function's description."""

    score: float
    params: tuple  # implied parameter bindings
    via: str  # keyword | synonym | embedding
    anchor_term: str  # the keyword/embedding term that was hit


def match_term(
    term: str,
    spec: FunctionSpec,
    embeddings: EmbeddingStore | None,
    tau_fn: float = DEFAULT_TAU_FN,
) -> TermMatch | None:
    """Best match of a single lowercase term against one function.

    Paths, best wins: exact keyword hit -> keyword weight; synonym hit ->
    0.9 x the mapped keyword's weight; embedding cosine against each
    embedding term, taken only when >= tau_fn. The embedding path is capped
    at the exact-keyword weight when the term itself is a keyword, so the
    distributional route can never beat exact knowledge for the same term.
    """
    best: TermMatch | None = None
    kw = spec.keywords.get(term)
    if kw is not None:
        best = TermMatch(kw.weight, kw.params, "keyword", term)
    syn_target = spec.synonyms.get(term)
    if syn_target is not None:
        target = spec.keywords[syn_target]
        cand = TermMatch(0.9 * target.weight, target.params, "synonym", syn_target)
        if best is None or cand.score > best.score:
            best = cand
    if embeddings is not None and term in embeddings:
        emb_best: tuple[float, str] | None = None
        for et in spec.embedding_terms:
            cos = embeddings.cosine(term, et)
            if cos is None or cos < tau_fn:
                continue
            if emb_best is None or cos > emb_best[0]:
                emb_best = (cos, et)
        if emb_best is not None:
            score, et = emb_best
            if kw is not None:
                score = min(score, kw.weight)
            et_kw = spec.keywords.get(et)
            params = et_kw.params if et_kw else ()
            cand = TermMatch(score, params, "embedding", et)
            if best is None or cand.score > best.score:
                best = cand
    return best


def match_function(
    span_terms: list[str],
    spec: FunctionSpec,
    embeddings: EmbeddingStore | None = None,
    tau_fn: float = DEFAULT_TAU_FN,
) -> float:
    """Match score in [0, 1] of a span against a function description."""
    best = 0.0
    for term in span_terms:
        m = match_term(term, spec, embeddings, tau_fn)
        if m is not None:
            best = max(best, min(1.0, m.score))
    return best


@dataclass
class Registry:
    functions: list[FunctionSpec]

    def __post_init__(self):
        ids = [f.id for f in self.functions]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate function ids in registry")
        self._by_id = {f.id: f for f in self.functions}
        self.compatibility: dict[str, list[FunctionSpec]] = {}
        for f in self.functions:
            self.compatibility.setdefault(f.output.kind, []).append(f)

    def get(self, fn_id: str) -> FunctionSpec:
        return self._by_id[fn_id]

    def __contains__(self, fn_id: str) -> bool:
        return fn_id in self._by_id

    def producers_of(self, kind: str) -> list[FunctionSpec]:
        """Functions whose declared output kind is ``kind``."""
        return list(self.compatibility.get(kind, []))


def builtin_registry() -> Registry:
    """The bundled function set: table operations plus AI-based operations."""
    table = ValueKind("table")
    seriesk = ValueKind("series")
    scalark = ValueKind("scalar")
    functions = [
        FunctionSpec(
            id="scan",
            keywords={"rows": _kw(0.7), "row": _kw(0.7), "records": _kw(0.7), "everything": _kw(0.6)},
            output=table,
            executor_ref="scan",
        ),
        FunctionSpec(
            id="filter",
            keywords={"filter": _kw(1.0), "where": _kw(0.6), "only": _kw(0.6)},
            inputs=[InputSlot("table", table)],
            params=[
                ParamSlot("column", "column"),
                ParamSlot("op", "filter_op", "="),
                ParamSlot("literal", "string"),
            ],
            output=table,
            executor_ref="filter",
            embedding_terms=["filter", "only"],
        ),
        FunctionSpec(
            id="project",
            keywords={"values": _kw(0.7), "series": _kw(0.7)},
            inputs=[InputSlot("table", table)],
            params=[ParamSlot("column", "column"), ParamSlot("label_column", "column")],
            output=seriesk,
            executor_ref="project",
        ),
        FunctionSpec(
            id="aggregate",
            keywords={
                "average": _kw(1.0, fn="mean"),
                "mean": _kw(1.0, fn="mean"),
                "total": _kw(1.0, fn="sum"),
                "sum": _kw(1.0, fn="sum"),
                "combined": _kw(0.8, fn="sum"),
                "altogether": _kw(0.8, fn="sum"),
                "minimum": _kw(1.0, fn="min"),
                "min": _kw(0.9, fn="min"),
                "lowest": _kw(1.0, fn="min"),
                "cheapest": _kw(1.0, fn="min"),
                "smallest": _kw(1.0, fn="min"),
                "maximum": _kw(1.0, fn="max"),
                "max": _kw(0.9, fn="max"),
                "highest": _kw(1.0, fn="max"),
                "largest": _kw(1.0, fn="max"),
                "biggest": _kw(1.0, fn="max"),
                "peak": _kw(0.9, fn="max"),
                "count": _kw(1.0, fn="count"),
                "many": _kw(0.8, fn="count"),
                "number": _kw(0.7, fn="count"),
            },
            inputs=[InputSlot("values", seriesk)],
            params=[ParamSlot("fn", "agg_fn", "mean")],
            output=scalark,
            executor_ref="aggregate",
            synonyms={"avg": "average", "overall": "total", "entire": "total"},
            embedding_terms=["average", "total", "minimum", "maximum", "count"],
        ),
        FunctionSpec(
            id="group_aggregate",
            keywords={
                "average": _kw(1.0, fn="mean"),
                "mean": _kw(1.0, fn="mean"),
                "total": _kw(1.0, fn="sum"),
                "sum": _kw(1.0, fn="sum"),
                "count": _kw(1.0, fn="count"),
                "minimum": _kw(0.9, fn="min"),
                "maximum": _kw(0.9, fn="max"),
                "breakdown": _kw(0.9),
                "distribution": _kw(0.7),
                "grouped": _kw(0.9),
            },
            inputs=[InputSlot("table", table)],
            params=[
                ParamSlot("key_column", "column"),
                ParamSlot("value_column", "column"),
                ParamSlot("fn", "agg_fn", "mean"),
            ],
            output=seriesk,
            executor_ref="group_aggregate",
            synonyms={"avg": "average"},
            embedding_terms=["average", "total", "breakdown"],
        ),
        FunctionSpec(
            id="top_k",
            keywords={
                "top": _kw(1.0, direction="top"),
                "highest": _kw(1.0, direction="top"),
                "largest": _kw(1.0, direction="top"),
                "biggest": _kw(1.0, direction="top"),
                "most": _kw(1.0, direction="top"),
                "best": _kw(0.9, direction="top"),
                "leading": _kw(0.9, direction="top"),
                "bottom": _kw(1.0, direction="bottom"),
                "lowest": _kw(1.0, direction="bottom"),
                "smallest": _kw(1.0, direction="bottom"),
                "least": _kw(1.0, direction="bottom"),
                "fewest": _kw(1.0, direction="bottom"),
                "cheapest": _kw(1.0, direction="bottom"),
                "worst": _kw(0.9, direction="bottom"),
            },
            inputs=[InputSlot("values", seriesk)],
            params=[ParamSlot("k", "int", 1), ParamSlot("direction", "direction", "top")],
            output=seriesk,
            executor_ref="top_k",
            synonyms={"greatest": "highest", "priciest": "highest"},
            embedding_terms=["top", "highest", "lowest", "largest", "smallest"],
        ),
        FunctionSpec(
            id="lookup",
            keywords={
                "which": _kw(0.7),
                "who": _kw(0.7),
                "named": _kw(0.8),
                "name": _kw(0.7),
                "identify": _kw(0.8),
                "located": _kw(0.7),
            },
            inputs=[InputSlot("table", table)],
            params=[ParamSlot("column", "column")],
            # declared scalar; the executor yields text for non-numeric
            # cells, which is safe because lookup only ever sits at the sink
            output=scalark,
            executor_ref="lookup",
        ),
        FunctionSpec(
            id="compare",
            keywords={
                "compare": _kw(1.0),
                "comparison": _kw(1.0),
                "difference": _kw(1.0),
                "differ": _kw(0.9),
                "gap": _kw(0.9),
                "versus": _kw(1.0),
                "vs": _kw(1.0),
                "delta": _kw(0.9),
                "change": _kw(0.9),
                "changed": _kw(0.9),
                "than": _kw(0.8),
            },
            inputs=[InputSlot("left", scalark), InputSlot("right", scalark)],
            params=[],
            output=scalark,
            executor_ref="compare",
            synonyms={"contrast": "compare"},
            embedding_terms=["compare", "difference", "versus"],
        ),
        FunctionSpec(
            id="forecast",
            keywords={
                "forecast": _kw(1.0),
                "forecasts": _kw(1.0),
                "predict": _kw(1.0),
                "predicted": _kw(1.0),
                "prediction": _kw(1.0),
                "predictions": _kw(1.0),
                "develop": _kw(1.0),
                "development": _kw(0.9),
                "evolve": _kw(0.9),
                "future": _kw(0.9),
                "outlook": _kw(0.9),
                "expect": _kw(0.9),
                "expected": _kw(0.9),
                "projection": _kw(0.9),
                "anticipate": _kw(0.9),
                "estimate": _kw(0.8),
                "trend": _kw(0.7),
            },
            inputs=[InputSlot("history", ValueKind("series", "temporal"))],
            params=[ParamSlot("horizon", "int", 1)],
            output=ValueKind("forecast"),
            executor_ref="forecast",
            synonyms={"foresee": "predict", "extrapolate": "predict", "prognosis": "forecast"},
            embedding_terms=["forecast", "predict", "future", "develop"],
        ),
        FunctionSpec(
            id="detect_anomalies",
            keywords={
                "anomaly": _kw(1.0),
                "anomalies": _kw(1.0),
                "anomalous": _kw(1.0),
                "outlier": _kw(1.0),
                "outliers": _kw(1.0),
                "unusual": _kw(1.0),
                "abnormal": _kw(1.0),
                "irregular": _kw(0.9),
                "irregularities": _kw(0.9),
                "spike": _kw(0.9),
                "spikes": _kw(0.9),
                "deviation": _kw(0.8),
                "deviations": _kw(0.8),
                "odd": _kw(0.8),
                "strange": _kw(0.8),
                "weird": _kw(0.8),
            },
            inputs=[InputSlot("values", seriesk)],
            params=[ParamSlot("threshold", "float", 2.5)],
            output=ValueKind("anomaly_report"),
            executor_ref="detect_anomalies",
            synonyms={"aberration": "anomaly", "aberrations": "anomaly"},
            embedding_terms=["anomaly", "outlier", "unusual", "spike"],
        ),
    ]
    return Registry(functions)


def _parse_kind(raw) -> ValueKind:
    if isinstance(raw, str):
        return ValueKind(raw)
    return ValueKind(raw["kind"], raw.get("element_hint"))


def _parse_function(raw: dict) -> FunctionSpec:
    keywords = {}
    for term, spec in raw.get("keywords", {}).items():
        if isinstance(spec, (int, float)):
            keywords[term] = Keyword(float(spec))
        else:
            keywords[term] = Keyword(
                float(spec.get("weight", 1.0)),
                tuple(sorted(spec.get("params", {}).items())),
            )
    return FunctionSpec(
        id=raw["id"],
        keywords=keywords,
        inputs=[
            InputSlot(s["name"], _parse_kind(s["kind"]), s.get("required", True))
            for s in raw.get("inputs", [])
        ],
        params=[
            ParamSlot(p["name"], p.get("literal_kind", "string"), p.get("default"))
            for p in raw.get("params", [])
        ],
        output=_parse_kind(raw["output"]),
        executor_ref=raw["executor_ref"],
        synonyms=raw.get("synonyms", {}),
        embedding_terms=raw.get("embedding_terms", []),
    )


def load_registry(manifest_path: str | Path | None = None) -> Registry:
    """Builtin registry, optionally extended by a JSON manifest.

    Manifest entries may add new functions or override builtin ones by id;
    executor_ref must name a registered built-in implementation (there is
    no arbitrary code loading).
    """
    registry = builtin_registry()
    if manifest_path is None:
        return registry
    from .executor import EXECUTORS  # late import: executor depends on graph

    raw = json.loads(Path(manifest_path).read_text())
    extra = [_parse_function(entry) for entry in raw]
    for f in extra:
        if f.executor_ref not in EXECUTORS:
            raise ValueError(
                f"function {f.id!r}: executor_ref {f.executor_ref!r} is not a "
                "registered implementation"
            )
    merged = {f.id: f for f in registry.functions}
    for f in extra:
        merged[f.id] = f
    return Registry(list(merged.values()))
