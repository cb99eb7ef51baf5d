"""Data-/user-adaptive visualization recommendation.

A kNN model over historical labeled examples picks the top-3 of nine
visualization forms from the result's data characteristics (k = sqrt of
the example count, majority voting). An explicit modality request from
the phrase, when compatible with the result, pins rank 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .values import KIND_NAMES, Value

_DATA_DIR = Path(__file__).parent / "data"

VIZ_TYPES = (
    "text_answer",
    "kpi_card",
    "table_view",
    "bar_chart",
    "line_chart",
    "scatter_plot",
    "pie_chart",
    "geo_heatmap",
    "matrix_heatmap",
)

FEATURE_DIM = 14

_VIZ_ORDER = {v: i for i, v in enumerate(VIZ_TYPES)}


def _bucket(n: int) -> float:
    return float(min(4, int(math.log10(max(1, n)))))


def featurize(value: Value) -> np.ndarray:
    """Map a result value to the fixed 14-dimensional feature vector."""
    features = np.zeros(FEATURE_DIM)
    features[KIND_NAMES.index(value.kind)] = 1.0

    size = value.size
    features[8] = _bucket(size)

    if value.kind == "table":
        numeric = sum(1 for c in value.schema if c.semantic_type == "numerical")
        has_temporal = any(c.semantic_type == "temporal" for c in value.schema)
        has_geo = any(c.semantic_type == "location" for c in value.schema)
        cat_cols = [
            i
            for i, c in enumerate(value.schema)
            if c.semantic_type in ("categorical", "location")
        ]
        cardinality = max(
            (len({r[i] for r in value.rows}) for i in cat_cols), default=0
        )
    elif value.kind in ("scalar", "text", "boolean"):
        # single-value kinds: the kind one-hot and is_single_value carry
        # everything, so every other feature stays zero
        numeric, has_temporal, has_geo, cardinality = 0, False, False, 0
    elif value.kind == "series":
        numeric = 1
        has_temporal = value.label_kind == "temporal"
        has_geo = False
        cardinality = len(value.points) if value.label_kind == "categorical" else 0
    elif value.kind == "geo_series":
        numeric, has_temporal, has_geo = 1, False, True
        cardinality = len(value.points)
    elif value.kind == "forecast":
        numeric, has_temporal, has_geo, cardinality = 1, True, False, 0
    else:  # anomaly_report
        inner = value.series
        numeric = 1
        has_temporal = inner is not None and inner.kind == "series" and inner.label_kind == "temporal"
        has_geo = inner is not None and inner.kind == "geo_series"
        cardinality = 0

    features[9] = float(numeric)
    features[10] = 1.0 if has_temporal else 0.0
    features[11] = 1.0 if has_geo else 0.0
    features[12] = _bucket(cardinality) if cardinality else 0.0
    features[13] = 1.0 if size == 1 else 0.0
    return features


@dataclass
class VizModel:
    """Historical (feature vector, label) examples + normalization constants."""

    examples: list[tuple[np.ndarray, str]]
    mins: np.ndarray = field(default=None)
    maxs: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.mins is None or self.maxs is None:
            self._fit_normalization()

    def _fit_normalization(self):
        if not self.examples:
            self.mins = np.zeros(FEATURE_DIM)
            self.maxs = np.ones(FEATURE_DIM)
            return
        stacked = np.stack([f for f, _ in self.examples])
        self.mins = stacked.min(axis=0)
        self.maxs = stacked.max(axis=0)

    def normalize(self, features: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        span = np.where(span == 0, 1.0, span)
        return (features - self.mins) / span

    def __len__(self) -> int:
        return len(self.examples)

    def to_dict(self) -> dict:
        return {
            "examples": [
                {"features": [round(float(x), 6) for x in f], "label": label}
                for f, label in self.examples
            ],
            "mins": [round(float(x), 6) for x in self.mins],
            "maxs": [round(float(x), 6) for x in self.maxs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VizModel":
        examples = [
            (np.asarray(e["features"], dtype=float), e["label"]) for e in d["examples"]
        ]
        mins = np.asarray(d["mins"], dtype=float) if "mins" in d else None
        maxs = np.asarray(d["maxs"], dtype=float) if "maxs" in d else None
        return cls(examples, mins, maxs)

    @classmethod
    def from_file(cls, path: str | Path) -> "VizModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True))


def knn_k(n: int) -> int:
    """Neighborhood size: square root of the example count, at least one."""
    return max(1, round(math.sqrt(n)))


def predict_topk(
    model: VizModel, features: np.ndarray, k_out: int = 3
) -> list[tuple[str, int]]:
    """Majority vote of the sqrt(|N|) nearest examples, top k_out labels.

    Distance is Euclidean over min-max-normalized features; neighbor ties
    break by insertion order, label ties by mean neighbor distance then by
    the fixed visualization-type order.
    """
    if not model.examples:
        raise ValueError("viz model has no examples")
    k = knn_k(len(model))
    q = model.normalize(features)
    scored = []
    for idx, (f, label) in enumerate(model.examples):
        d = float(np.linalg.norm(model.normalize(f) - q))
        scored.append((d, idx, label))
    scored.sort(key=lambda t: (t[0], t[1]))
    neighbors = scored[:k]

    votes: dict[str, int] = {}
    dist_sum: dict[str, float] = {}
    for d, _, label in neighbors:
        votes[label] = votes.get(label, 0) + 1
        dist_sum[label] = dist_sum.get(label, 0.0) + d
    ranked = sorted(
        votes,
        key=lambda lbl: (-votes[lbl], dist_sum[lbl] / votes[lbl], _VIZ_ORDER.get(lbl, 99)),
    )
    return [(label, votes[label]) for label in ranked[: max(0, k_out)]]


# ----------------------------------------------------------------------
# compatibility + recommendation
# ----------------------------------------------------------------------


def load_compat_matrix(path: str | Path | None = None) -> dict[str, list[str]]:
    return json.loads(Path(path or _DATA_DIR / "compat_matrix.json").read_text())


def compatible(viz_type: str, value: Value, matrix: dict[str, list[str]]) -> bool:
    allowed = matrix.get(viz_type, [])
    if value.kind not in allowed:
        return False
    if viz_type == "geo_heatmap" and value.kind == "table":
        return any(c.semantic_type == "location" for c in value.schema)
    if viz_type == "matrix_heatmap" and value.kind == "table":
        return sum(1 for c in value.schema if c.semantic_type == "numerical") >= 1
    return True


@dataclass
class VizSpec:
    viz_type: str
    binding: dict
    title: str
    ranking: list[tuple[str, int]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    stacked: list["VizSpec"] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "viz_type": self.viz_type,
            "binding": self.binding,
            "title": self.title,
            "ranking": [{"viz_type": v, "votes": n} for v, n in self.ranking],
            "diagnostics": list(self.diagnostics),
        }
        if self.stacked:
            d["stacked"] = [s.to_dict() for s in self.stacked]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VizSpec":
        return cls(
            viz_type=d["viz_type"],
            binding=d.get("binding", {}),
            title=d.get("title", ""),
            ranking=[(r["viz_type"], r["votes"]) for r in d.get("ranking", [])],
            diagnostics=d.get("diagnostics", []),
            stacked=[cls.from_dict(s) for s in d.get("stacked", [])],
        )


def binding_for(viz_type: str, value: Value) -> dict:
    if value.kind in ("series", "geo_series"):
        label_axis = "region" if value.kind == "geo_series" else (value.label_kind or "label")
        binding = {"x": label_axis, "y": value.name or "value"}
        if value.unit:
            binding["unit"] = value.unit
        if viz_type == "geo_heatmap":
            binding = {"region": "code", "value": value.name or "value"}
            if value.unit:
                binding["unit"] = value.unit
        return binding
    if value.kind == "scalar":
        return {"value": value.value, "unit": value.unit}
    if value.kind == "table":
        return {"columns": [c.name for c in value.schema]}
    if value.kind == "forecast":
        return {"x": "temporal", "y": value.history.name if value.history else "value",
                "predicted_from": value.predicted[0][0] if value.predicted else None}
    if value.kind == "anomaly_report":
        return {"x": "label", "y": "value", "flagged": list(value.flagged)}
    return {}


def _title_for(value: Value) -> str:
    if value.name:
        return value.name
    return value.kind.replace("_", " ")


def recommend(
    value: Value,
    modality: str | None,
    model: VizModel,
    matrix: dict[str, list[str]] | None = None,
) -> VizSpec:
    """Top-3 visualization ranking for a result, honoring a requested form.

    Data-adaptive ranking comes from the kNN model filtered to compatible
    types; a compatible explicitly-requested modality pins rank 1 and kNN
    fills the rest. An incompatible modality is ignored with a diagnostic.
    """
    matrix = matrix or load_compat_matrix()
    features = featurize(value)
    diagnostics: list[str] = []

    raw = predict_topk(model, features, k_out=len(VIZ_TYPES))
    votes_by_type = dict(raw)
    ranked = [(v, n) for v, n in raw if compatible(v, value, matrix)]
    # a unanimous neighborhood still yields three ranks: pad with the
    # remaining compatible forms in the fixed order, zero votes
    if len(ranked) < 3:
        seen = {v for v, _ in ranked}
        for viz_type in VIZ_TYPES:
            if len(ranked) >= 3:
                break
            if viz_type not in seen and compatible(viz_type, value, matrix):
                ranked.append((viz_type, 0))

    if not ranked:
        ranked = [("text_answer", 0)]
        diagnostics.append("no learned compatible type; falling back to text_answer")

    if modality is not None:
        if compatible(modality, value, matrix):
            pinned = [(modality, votes_by_type.get(modality, 0))]
            rest = [(v, n) for v, n in ranked if v != modality]
            ranked = pinned + rest
        else:
            diagnostics.append(
                f"requested {modality} is incompatible with a {value.kind} result; ignored"
            )

    ranking = ranked[:3]
    top = ranking[0][0]
    return VizSpec(
        viz_type=top,
        binding=binding_for(top, value),
        title=_title_for(value),
        ranking=ranking,
        diagnostics=diagnostics,
    )


def bundled_model_path() -> Path:
    return _DATA_DIR / "viz_model.json"


def leave_one_out_top3(model: VizModel) -> float:
    """Fraction of examples whose label appears in the top-3 prediction
    computed from all other examples."""
    if len(model) < 2:
        return 0.0
    hits = 0
    for i, (features, label) in enumerate(model.examples):
        rest = VizModel([e for j, e in enumerate(model.examples) if j != i])
        top3 = [v for v, _ in predict_topk(rest, features, k_out=3)]
        if label in top3:
            hits += 1
    return hits / len(model)


def zeror_topn(labels: list[str], n: int) -> list[str]:
    """The n most frequent labels (the ZeroR baseline's fixed prediction)."""
    counts: dict[str, int] = {}
    for lbl in labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    ranked = sorted(counts, key=lambda l: (-counts[l], _VIZ_ORDER.get(l, 99)))
    return ranked[:n]
