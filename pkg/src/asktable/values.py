"""Machine-readable result values and the static kind vocabulary.

Every operation consumes and produces ``Value`` instances; the wire format
is a JSON object tagged by a ``kind`` field. ``ValueKind`` is the static
type the graph builder checks edges against: a kind name plus an optional
element hint (label semantics for series-like kinds).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

KIND_NAMES = (
    "scalar",
    "text",
    "boolean",
    "series",
    "table",
    "geo_series",
    "forecast",
    "anomaly_report",
)

ELEMENT_HINTS = ("numerical", "categorical", "temporal", "location")


@dataclass(frozen=True)
class ValueKind:
    """Static type of a value: kind name + optional label-element hint."""

    kind: str
    element_hint: str | None = None

    def __post_init__(self):
        if self.kind not in KIND_NAMES:
            raise ValueError(f"unknown value kind {self.kind!r}")
        if self.element_hint is not None:
            if self.kind not in ("series", "table", "geo_series"):
                raise ValueError(f"element_hint not allowed for kind {self.kind!r}")
            if self.element_hint not in ELEMENT_HINTS:
                raise ValueError(f"unknown element hint {self.element_hint!r}")

    def accepts(self, other: "ValueKind") -> bool:
        """Slot compatibility: does a value of kind ``other`` fit this slot?

        A plain ``series`` slot accepts location-labelled series (which
        materialize as geo_series values) and a ``geo_series`` slot accepts
        location-hinted series; hints, when required, must match.
        """
        if self.kind == other.kind:
            return self.element_hint is None or self.element_hint == other.element_hint
        if self.kind == "series" and other.kind == "geo_series":
            return self.element_hint is None or self.element_hint == "location"
        if self.kind == "geo_series" and other.kind == "series":
            return other.element_hint == "location"
        return False

    def __str__(self) -> str:
        if self.element_hint:
            return f"{self.kind}({self.element_hint})"
        return self.kind


@dataclass
class TableColumn:
    name: str
    semantic_type: str
    unit: str | None = None


@dataclass
class Value:
    """Tagged union of result payloads.

    kind        payload fields
    ----------  -------------------------------------------------------
    scalar      value: float, unit
    text        text: str
    boolean     flag: bool
    series      points: [(label, float)], label_kind, unit, name
    table       schema: [TableColumn], rows: [tuple]
    geo_series  points: [(region code, float)], unit, name
    forecast    history: Value(series), predicted: [(label, float, stderr)]
    anomaly_report  series: Value(series), flagged: [int], threshold
    """

    kind: str
    value: float | None = None
    unit: str | None = None
    text: str | None = None
    flag: bool | None = None
    points: list[tuple] = field(default_factory=list)
    label_kind: str | None = None
    name: str | None = None
    schema: list[TableColumn] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)
    history: "Value | None" = None
    predicted: list[tuple] = field(default_factory=list)
    series: "Value | None" = None
    flagged: list[int] = field(default_factory=list)
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in KIND_NAMES:
            raise ValueError(f"unknown value kind {self.kind!r}")
        if self.kind in ("series", "geo_series"):
            labels = [p[0] for p in self.points]
            if len(set(labels)) != len(labels):
                raise ValueError("series labels must be unique")
        if self.kind == "forecast" and self.history is not None:
            history_labels = {p[0] for p in self.history.points}
            for p in self.predicted:
                if p[0] in history_labels:
                    raise ValueError("predicted labels must extend beyond history")
        if self.kind == "anomaly_report" and self.series is not None:
            n = len(self.series.points)
            if any(i < 0 or i >= n for i in self.flagged):
                raise ValueError("anomaly indices out of series bounds")

    @property
    def size(self) -> int:
        """Number of data points carried by the value."""
        if self.kind in ("scalar", "text", "boolean"):
            return 1
        if self.kind in ("series", "geo_series"):
            return len(self.points)
        if self.kind == "table":
            return len(self.rows)
        if self.kind == "forecast":
            hist = len(self.history.points) if self.history else 0
            return hist + len(self.predicted)
        if self.kind == "anomaly_report":
            return len(self.series.points) if self.series else 0
        return 0

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "scalar":
            d["value"] = self.value
            d["unit"] = self.unit
        elif self.kind == "text":
            d["text"] = self.text
        elif self.kind == "boolean":
            d["flag"] = self.flag
        elif self.kind == "series":
            d["points"] = [list(p) for p in self.points]
            d["label_kind"] = self.label_kind
            d["unit"] = self.unit
            d["name"] = self.name
        elif self.kind == "geo_series":
            d["points"] = [list(p) for p in self.points]
            d["unit"] = self.unit
            d["name"] = self.name
        elif self.kind == "table":
            d["schema"] = [
                {"name": c.name, "semantic_type": c.semantic_type, "unit": c.unit}
                for c in self.schema
            ]
            d["rows"] = [list(r) for r in self.rows]
        elif self.kind == "forecast":
            d["history"] = self.history.to_dict() if self.history else None
            d["predicted"] = [list(p) for p in self.predicted]
            d["unit"] = self.unit
        elif self.kind == "anomaly_report":
            d["series"] = self.series.to_dict() if self.series else None
            d["flagged"] = list(self.flagged)
            d["threshold"] = self.threshold
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Value":
        kind = d["kind"]
        if kind == "scalar":
            return cls(kind=kind, value=d.get("value"), unit=d.get("unit"))
        if kind == "text":
            return cls(kind=kind, text=d.get("text"))
        if kind == "boolean":
            return cls(kind=kind, flag=d.get("flag"))
        if kind == "series":
            return cls(
                kind=kind,
                points=[tuple(p) for p in d.get("points", [])],
                label_kind=d.get("label_kind"),
                unit=d.get("unit"),
                name=d.get("name"),
            )
        if kind == "geo_series":
            return cls(
                kind=kind,
                points=[tuple(p) for p in d.get("points", [])],
                unit=d.get("unit"),
                name=d.get("name"),
            )
        if kind == "table":
            return cls(
                kind=kind,
                schema=[
                    TableColumn(c["name"], c["semantic_type"], c.get("unit"))
                    for c in d.get("schema", [])
                ],
                rows=[tuple(r) for r in d.get("rows", [])],
            )
        if kind == "forecast":
            return cls(
                kind=kind,
                history=cls.from_dict(d["history"]) if d.get("history") else None,
                predicted=[tuple(p) for p in d.get("predicted", [])],
                unit=d.get("unit"),
            )
        if kind == "anomaly_report":
            return cls(
                kind=kind,
                series=cls.from_dict(d["series"]) if d.get("series") else None,
                flagged=list(d.get("flagged", [])),
                threshold=d.get("threshold"),
            )
        raise ValueError(f"unknown value kind {kind!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def scalar(value: float, unit: str | None = None) -> Value:
    return Value(kind="scalar", value=float(value), unit=unit)


def text(content: str) -> Value:
    return Value(kind="text", text=content)


def series(
    points: list[tuple],
    label_kind: str,
    unit: str | None = None,
    name: str | None = None,
) -> Value:
    """Build a series value; location-labelled series become geo_series."""
    if label_kind == "location":
        return Value(kind="geo_series", points=points, unit=unit, name=name)
    return Value(kind="series", points=points, label_kind=label_kind, unit=unit, name=name)
