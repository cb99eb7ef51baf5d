"""The function manager: run an operation graph over the dataset.

Nodes execute in topological order; each receives its predecessors'
values in slot order plus its bound parameters. The sink value is the
machine-readable answer; the trace keeps every intermediate for
step-back exploration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .dataset import Dataset, parse_number
from .errors import (
    DegenerateFitError,
    EmptyAggregationError,
    ExecutionError,
)
from .graph import OperationGraph
from .values import TableColumn, Value, scalar, series, text


@dataclass
class ExecutionTrace:
    results: dict[str, Value] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "results": {nid: v.to_dict() for nid, v in self.results.items()},
            "timings_ms": {nid: round(t, 3) for nid, t in self.timings_ms.items()},
        }


def _table_from_dataset(dataset: Dataset) -> Value:
    schema = [TableColumn(c.name, c.semantic_type, c.unit) for c in dataset.columns]
    return Value(kind="table", schema=schema, rows=list(dataset.rows))


def _col_index(table: Value, column: str) -> int:
    for i, c in enumerate(table.schema):
        if c.name == column:
            return i
    raise ExecutionError(f"unknown column {column!r}")


def _cell_number(cell) -> float:
    if isinstance(cell, (int, float)):
        return float(cell)
    parsed = parse_number(str(cell))
    if parsed is None:
        raise ExecutionError(f"non-numeric cell {cell!r}")
    return parsed


def op_scan(inputs, params, dataset: Dataset) -> Value:
    return _table_from_dataset(dataset)


def _matches(cell, op: str, literal, semantic_type: str) -> bool:
    if op in ("=", "in"):
        if semantic_type in ("numerical", "temporal"):
            cell_v = _cell_number(cell)
            if op == "=":
                return cell_v == _cell_number(literal)
            return any(cell_v == _cell_number(x) for x in literal)
        cell_s = str(cell).lower()
        if op == "=":
            return cell_s == str(literal).lower()
        return cell_s in {str(x).lower() for x in literal}
    cell_v = _cell_number(cell)
    if op == "between":
        lo, hi = literal
        return _cell_number(lo) <= cell_v <= _cell_number(hi)
    bound = _cell_number(literal)
    if op == ">":
        return cell_v > bound
    if op == "<":
        return cell_v < bound
    if op == ">=":
        return cell_v >= bound
    if op == "<=":
        return cell_v <= bound
    raise ExecutionError(f"unknown filter op {op!r}")


def op_filter(inputs, params, dataset: Dataset) -> Value:
    table = inputs[0]
    idx = _col_index(table, params["column"])
    semantic_type = table.schema[idx].semantic_type
    rows = [
        r for r in table.rows if _matches(r[idx], params["op"], params["literal"], semantic_type)
    ]
    return Value(kind="table", schema=list(table.schema), rows=rows)


def _label_points(table: Value, value_column: str, label_column: str | None, dataset: Dataset):
    vi = _col_index(table, value_column)
    if label_column is None:
        return [(i, _cell_number(r[vi])) for i, r in enumerate(table.rows)], "numerical"
    li = _col_index(table, label_column)
    label_kind = table.schema[li].semantic_type
    points = []
    for r in table.rows:
        label = r[li]
        if label_kind == "temporal":
            label = int(_cell_number(label))
        elif label_kind == "location":
            label = dataset.gazetteer.code_for(str(label)) or str(label)
        else:
            label = str(label)
        points.append((label, _cell_number(r[vi])))
    return points, label_kind


def op_project(inputs, params, dataset: Dataset) -> Value:
    table = inputs[0]
    column = params["column"]
    points, label_kind = _label_points(table, column, params.get("label_column"), dataset)
    labels = [p[0] for p in points]
    if len(set(labels)) != len(labels):
        raise ExecutionError(
            f"projection of {column!r} has duplicate {params.get('label_column')!r} labels"
        )
    points.sort(key=lambda p: (p[0] is None, p[0]))
    unit = table.schema[_col_index(table, column)].unit
    return series(points, label_kind, unit=unit, name=column)


def _agg(values: list[float], fn: str) -> float:
    if fn == "count":
        return float(len(values))
    if fn == "sum":
        return math.fsum(values)
    if not values:
        raise EmptyAggregationError(f"{fn} over an empty series")
    if fn == "mean":
        return math.fsum(values) / len(values)
    if fn == "min":
        return min(values)
    if fn == "max":
        return max(values)
    raise ExecutionError(f"unknown aggregation {fn!r}")


def op_aggregate(inputs, params, dataset: Dataset) -> Value:
    values_in = inputs[0]
    fn = params["fn"]
    numbers = [float(p[1]) for p in values_in.points]
    result = _agg(numbers, fn)
    unit = None if fn == "count" else values_in.unit
    return scalar(result, unit)


def op_group_aggregate(inputs, params, dataset: Dataset) -> Value:
    table = inputs[0]
    key_column, value_column, fn = params["key_column"], params["value_column"], params["fn"]
    points, label_kind = _label_points(table, value_column, key_column, dataset)
    groups: dict = {}
    for label, v in points:
        groups.setdefault(label, []).append(v)
    out = [(label, _agg(vals, fn)) for label, vals in sorted(groups.items())]
    vi = _col_index(table, value_column)
    unit = None if fn == "count" else table.schema[vi].unit
    return series(out, label_kind, unit=unit, name=f"{fn} {value_column} by {key_column}")


def op_top_k(inputs, params, dataset: Dataset) -> Value:
    values_in = inputs[0]
    k = int(params["k"])
    direction = params["direction"]
    reverse = direction != "bottom"
    ranked = sorted(values_in.points, key=lambda p: (-p[1] if reverse else p[1], str(p[0])))
    top = ranked[: max(0, k)]
    if values_in.kind == "geo_series":
        return Value(kind="geo_series", points=top, unit=values_in.unit, name=values_in.name)
    return Value(
        kind="series",
        points=top,
        label_kind=values_in.label_kind,
        unit=values_in.unit,
        name=values_in.name,
    )


def op_lookup(inputs, params, dataset: Dataset) -> Value:
    table = inputs[0]
    idx = _col_index(table, params["column"])
    if len(table.rows) != 1:
        raise ExecutionError(
            f"lookup expects exactly one row, got {len(table.rows)}"
        )
    cell_value = table.rows[0][idx]
    column = table.schema[idx]
    if column.semantic_type in ("numerical", "temporal"):
        return scalar(_cell_number(cell_value), column.unit)
    return text(str(cell_value))


def op_compare(inputs, params, dataset: Dataset) -> Value:
    left, right = inputs
    unit = left.unit if left.unit == right.unit else None
    return scalar(left.value - right.value, unit)


def op_forecast(inputs, params, dataset: Dataset) -> Value:
    history = inputs[0]
    horizon = int(params.get("horizon") or 1)
    if horizon < 1:
        raise ExecutionError("forecast horizon must be positive")
    points = sorted(((int(_cell_number(p[0])), float(p[1])) for p in history.points))
    if len(points) < 2 or len({t for t, _ in points}) < 2:
        raise DegenerateFitError("need at least two distinct temporal labels")
    ts = [float(t) for t, _ in points]
    ys = [y for _, y in points]
    n = len(points)
    t_mean = math.fsum(ts) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((t - t_mean) ** 2 for t in ts)
    sxy = math.fsum((t - t_mean) * (y - y_mean) for t, y in zip(ts, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * t_mean
    residuals = [y - (intercept + slope * t) for t, y in zip(ts, ys)]
    if n > 2:
        stderr = math.sqrt(math.fsum(r * r for r in residuals) / (n - 2))
    else:
        stderr = 0.0
    last = points[-1][0]
    predicted = [
        (last + i, intercept + slope * (last + i), stderr) for i in range(1, horizon + 1)
    ]
    clean_history = Value(
        kind="series",
        points=[(t, y) for t, y in points],
        label_kind="temporal",
        unit=history.unit,
        name=history.name,
    )
    return Value(kind="forecast", history=clean_history, predicted=predicted, unit=history.unit)


def op_detect_anomalies(inputs, params, dataset: Dataset) -> Value:
    values_in = inputs[0]
    threshold = float(params.get("threshold") or 2.5)
    if threshold <= 0:
        raise ExecutionError("anomaly threshold must be positive")
    numbers = [float(p[1]) for p in values_in.points]
    if len(numbers) < 3:
        raise ExecutionError("anomaly detection needs at least three points")
    mean = math.fsum(numbers) / len(numbers)
    variance = math.fsum((x - mean) ** 2 for x in numbers) / len(numbers)
    std = math.sqrt(variance)
    if std == 0.0:
        flagged: list[int] = []
    else:
        flagged = [i for i, x in enumerate(numbers) if abs(x - mean) / std > threshold]
    return Value(kind="anomaly_report", series=values_in, flagged=flagged, threshold=threshold)


EXECUTORS = {
    "scan": op_scan,
    "filter": op_filter,
    "project": op_project,
    "aggregate": op_aggregate,
    "group_aggregate": op_group_aggregate,
    "top_k": op_top_k,
    "lookup": op_lookup,
    "compare": op_compare,
    "forecast": op_forecast,
    "detect_anomalies": op_detect_anomalies,
}


def execute(
    graph: OperationGraph, dataset: Dataset, registry=None
) -> tuple[Value, ExecutionTrace]:
    """Run all nodes in dependency order; answer is the sink's value.

    Manifest-added functions resolve through their spec's executor_ref
    when a registry is supplied; built-in ids map to themselves.
    """
    trace = ExecutionTrace()
    for node in graph.nodes:
        impl = EXECUTORS.get(node.function)
        if impl is None and registry is not None and node.function in registry:
            impl = EXECUTORS.get(registry.get(node.function).executor_ref)
        if impl is None:
            raise ExecutionError(f"no executor for function {node.function!r}", node.id)
        inputs = [trace.results[i] for i in node.input_edges]
        started = time.perf_counter()
        try:
            result = impl(inputs, node.bound_params, dataset)
        except ExecutionError as e:
            if e.node_id is None:
                e.node_id = node.id
            raise
        except Exception as e:  # defensive: tag any op failure with its node
            raise ExecutionError(f"{node.function}: {e}", node.id) from e
        trace.results[node.id] = result
        trace.order.append(node.id)
        trace.timings_ms[node.id] = (time.perf_counter() - started) * 1000.0
    if graph.sink not in trace.results:
        raise ExecutionError("graph executed but sink produced no value", graph.sink)
    return trace.results[graph.sink], trace
