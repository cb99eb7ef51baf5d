"""Tabular dataset loading, semantic type inference, and the alias lexicon.

A dataset is one in-memory CSV table. Each column gets one of four semantic
types (numerical, categorical, temporal, location); categorical and location
cell values plus a gazetteer feed the alias lexicon that the annotator uses
to bind request vocabulary to data.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateColumnError,
    MissingFileError,
    RaggedRowError,
    SchemaError,
)

SEMANTIC_TYPES = ("numerical", "categorical", "temporal", "location")

_DATA_DIR = Path(__file__).parent / "data"

# Leading currency symbols and thousands separators are stripped before
# numeric parsing; request phrasing uses "$".
_CURRENCY_RE = re.compile(r"^[\s$€£]+")
_YEAR_RE = re.compile(r"^(19\d\d|20\d\d|2100)$")


def parse_number(text: str) -> float | None:
    """Parse a cell as a finite float, tolerating '$' and ',' decorations."""
    cleaned = _CURRENCY_RE.sub("", text.strip()).replace(",", "")
    if not cleaned:
        return None
    try:
        value = float(cleaned)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def is_year(text: str) -> bool:
    t = text.strip()
    if not _YEAR_RE.match(t):
        return False
    return 1900 <= int(t) <= 2100


@dataclass
class Gazetteer:
    """Region name <-> code lookup (bundled: US states)."""

    name_to_code: dict[str, str]
    code_to_name: dict[str, str]

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        entries = json.loads(Path(path).read_text())
        name_to_code = {e["name"].lower(): e["code"] for e in entries}
        code_to_name = {e["code"].lower(): e["name"] for e in entries}
        return cls(name_to_code, code_to_name)

    def canonical_name(self, token: str) -> str | None:
        """Resolve a name or code to the canonical region name."""
        t = token.lower()
        if t in self.name_to_code:
            # round-trip through the code so aliased spellings canonicalize
            return self.code_to_name[self.name_to_code[t].lower()]
        if t in self.code_to_name:
            return self.code_to_name[t]
        return None

    def code_for(self, name: str) -> str | None:
        return self.name_to_code.get(name.lower())

    def contains(self, token: str) -> bool:
        return self.canonical_name(token) is not None


def load_gazetteer(path: str | Path | None = None) -> Gazetteer:
    return Gazetteer.from_file(path or _DATA_DIR / "gazetteer.json")


@dataclass
class ColumnSchema:
    name: str
    semantic_type: str
    unit: str | None = None
    aliases: list[str] = field(default_factory=list)
    default_agg: str | None = None

    def __post_init__(self):
        if self.semantic_type not in SEMANTIC_TYPES:
            raise SchemaError(
                f"column {self.name!r}: semantic_type must be one of "
                f"{SEMANTIC_TYPES}, got {self.semantic_type!r}"
            )
        lowered = [a.lower() for a in self.aliases]
        if len(set(lowered)) != len(lowered):
            raise SchemaError(f"column {self.name!r}: duplicate aliases after lowercasing")
        self.aliases = lowered


@dataclass
class Dataset:
    """Immutable after load; safe for unlimited concurrent readers."""

    columns: list[ColumnSchema]
    rows: list[tuple]
    value_lexicon: dict[str, tuple[str, str]]
    gazetteer: Gazetteer
    table_aliases: list[str] = field(default_factory=list)
    name: str = "table"

    def column(self, name: str) -> ColumnSchema:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise KeyError(name)

    def columns_of_type(self, semantic_type: str) -> list[ColumnSchema]:
        return [c for c in self.columns if c.semantic_type == semantic_type]

    @property
    def column_lexicon(self) -> dict[str, str]:
        """alias/name -> column name, lowercased."""
        lex: dict[str, str] = {}
        for col in self.columns:
            lex[col.name.lower()] = col.name
            for alias in col.aliases:
                lex.setdefault(alias, col.name)
        return lex

    def resolve_alias(self, token: str) -> tuple[str, str] | None:
        """Bind a token to (column, canonical cell value), if it names data.

        Lookup order: column names, column aliases, gazetteer, cell values.
        A column-name hit is signalled with a None-value sentinel by
        ``resolve_column`` instead; this method only resolves cell values.
        """
        t = token.strip().lower()
        if not t:
            return None
        # gazetteer entries win over raw cell values so "AL" canonicalizes
        location_cols = self.columns_of_type("location")
        if location_cols:
            canonical = self.gazetteer.canonical_name(t)
            if canonical is not None:
                for col in location_cols:
                    if (canonical.lower(), col.name) in self._value_index:
                        return (col.name, canonical)
        hit = self.value_lexicon.get(t)
        if hit is not None:
            return hit
        return None

    def resolve_column(self, token: str) -> str | None:
        return self.column_lexicon.get(token.strip().lower())

    def __post_init__(self):
        self._value_index = {
            (value.lower(), column): value
            for alias, (column, value) in self.value_lexicon.items()
        }
        for row in self.rows:
            if len(row) != len(self.columns):
                raise RaggedRowError(
                    f"row has {len(row)} cells, expected {len(self.columns)}"
                )


def _infer_type(values: list[str], gazetteer: Gazetteer) -> str:
    non_empty = [v for v in values if v.strip()]
    if not non_empty:
        return "categorical"
    if all(is_year(v) for v in non_empty):
        return "temporal"
    if all(parse_number(v) is not None for v in non_empty):
        return "numerical"
    if all(gazetteer.contains(v) for v in non_empty):
        return "location"
    return "categorical"


def _load_overrides(path: str | Path | None) -> tuple[dict[str, dict], list[str]]:
    if path is None:
        return {}, []
    raw = json.loads(Path(path).read_text())
    if "columns" in raw or "table_aliases" in raw:
        return raw.get("columns", {}), [a.lower() for a in raw.get("table_aliases", [])]
    return raw, []


def load_dataset(
    path: str | Path,
    schema_overrides: str | Path | None = None,
    gazetteer: Gazetteer | None = None,
    name: str | None = None,
) -> Dataset:
    """Load a CSV file with a header row and infer column semantics.

    Inference per column: 4-digit integers in [1900, 2100] -> temporal;
    otherwise all-numeric -> numerical; values found in the location
    gazetteer -> location; else categorical. Overrides win over inference.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"dataset file not found: {path}")
    gaz = gazetteer or load_gazetteer()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise DuplicateColumnError(f"{path}: duplicate column names {dupes}")
        raw_rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedRowError(
                    f"{path}:{lineno}: row has {len(row)} cells, expected {len(header)}"
                )
            raw_rows.append([c.strip() for c in row])

    overrides, table_aliases = _load_overrides(schema_overrides)
    unknown = set(overrides) - set(header)
    if unknown:
        raise SchemaError(f"schema overrides name unknown columns: {sorted(unknown)}")

    columns: list[ColumnSchema] = []
    for i, col_name in enumerate(header):
        values = [r[i] for r in raw_rows]
        ov = overrides.get(col_name, {})
        semantic_type = ov.get("semantic_type") or _infer_type(values, gaz)
        columns.append(
            ColumnSchema(
                name=col_name,
                semantic_type=semantic_type,
                unit=ov.get("unit"),
                aliases=ov.get("aliases", []),
                default_agg=ov.get("default_agg"),
            )
        )

    rows: list[tuple] = []
    for raw in raw_rows:
        cells = []
        for col, cell in zip(columns, raw):
            if col.semantic_type == "numerical":
                value = parse_number(cell)
                if value is None:
                    raise SchemaError(
                        f"column {col.name!r}: non-numeric cell {cell!r} "
                        "in a numerical column"
                    )
                cells.append(value)
            elif col.semantic_type == "temporal":
                cells.append(int(cell) if is_year(cell) else cell)
            elif col.semantic_type == "location":
                cells.append(gaz.canonical_name(cell) or cell)
            else:
                cells.append(cell)
        rows.append(tuple(cells))

    value_lexicon: dict[str, tuple[str, str]] = {}
    for i, col in enumerate(columns):
        if col.semantic_type not in ("categorical", "location"):
            continue
        for row in rows:
            cell = str(row[i])
            value_lexicon.setdefault(cell.lower(), (col.name, cell))
            if col.semantic_type == "location":
                code = gaz.code_for(cell)
                if code:
                    value_lexicon.setdefault(code.lower(), (col.name, cell))

    return Dataset(
        columns=columns,
        rows=rows,
        value_lexicon=value_lexicon,
        gazetteer=gaz,
        table_aliases=table_aliases,
        name=name or path.stem,
    )


def bundled_dataset_path() -> Path:
    return _DATA_DIR / "honey.csv"


def bundled_schema_path() -> Path:
    return _DATA_DIR / "honey_schema.json"
