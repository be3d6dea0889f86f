"""Pluggable analytics methods: typed descriptors, mapping checks, execution.

A method declares typed required/optional inputs, typed outputs, and
parameters with defaults.  Mapping a method onto a dataset means binding
each input to a same-typed table column; bindings can be auto-suggested.
Executions are pure functions of (table, mappings, parameters), so they
are safe to run concurrently and deterministic given any seed parameter.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Mapping, Sequence

from .errors import EngineError, IssueReport
from .model import Column, ColumnType, DataTable, MISSING, Scalar


@dataclass(frozen=True)
class MethodInput:
    name: str
    type: ColumnType
    required: bool = True

    def to_doc(self) -> dict:
        return {"name": self.name, "type": self.type.value, "required": self.required}


@dataclass(frozen=True)
class MethodParameter:
    name: str
    type: ColumnType
    default: Scalar

    def to_doc(self) -> dict:
        return {"name": self.name, "type": self.type.value, "default": self.default}


@dataclass(frozen=True)
class AnalyticsMethodDescriptor:
    """Typed surface of one analytics method."""

    method_id: str
    name: str
    inputs: tuple[MethodInput, ...]
    outputs: tuple[Column, ...]
    parameters: tuple[MethodParameter, ...] = ()

    def __post_init__(self):
        for group, names in (
            ("inputs", [i.name for i in self.inputs]),
            ("outputs", [o.name for o in self.outputs]),
            ("parameters", [p.name for p in self.parameters]),
        ):
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate {group} names in {self.method_id}: {names}")
        if not self.outputs:
            raise ValueError(f"method {self.method_id} declares no outputs")

    def input(self, name: str) -> MethodInput | None:
        for i in self.inputs:
            if i.name == name:
                return i
        return None

    def to_doc(self) -> dict:
        return {
            "id": self.method_id,
            "name": self.name,
            "inputs": [i.to_doc() for i in self.inputs],
            "outputs": [o.to_doc() for o in self.outputs],
            "parameters": [p.to_doc() for p in self.parameters],
        }


@dataclass(frozen=True)
class MappingSet:
    """Bindings from method input names to dataset column names."""

    bindings: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def build(bindings: Mapping[str, str] | Iterable[tuple[str, str]]) -> "MappingSet":
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        return MappingSet(tuple((str(k), str(v)) for k, v in items))

    def as_dict(self) -> dict[str, str]:
        return dict(self.bindings)

    def column_for(self, input_name: str) -> str | None:
        return self.as_dict().get(input_name)

    def to_doc(self) -> dict:
        return self.as_dict()


MethodImpl = Callable[[DataTable, dict[str, int | None], dict[str, Scalar]], list[tuple]]


class MethodRegistry:
    """Immutable-after-startup registry of available analytics methods."""

    def __init__(self):
        self._methods: dict[str, tuple[AnalyticsMethodDescriptor, MethodImpl]] = {}

    def register(self, descriptor: AnalyticsMethodDescriptor, impl: MethodImpl) -> None:
        if descriptor.method_id in self._methods:
            raise ValueError(f"method {descriptor.method_id!r} already registered")
        self._methods[descriptor.method_id] = (descriptor, impl)

    def get(self, method_id: str) -> AnalyticsMethodDescriptor:
        try:
            return self._methods[method_id][0]
        except KeyError:
            raise EngineError("UnknownMethod", f"no analytics method {method_id!r}") from None

    def implementation(self, method_id: str) -> MethodImpl:
        self.get(method_id)
        return self._methods[method_id][1]

    def __contains__(self, method_id: str) -> bool:
        return method_id in self._methods


def list_methods(registry: MethodRegistry) -> list[AnalyticsMethodDescriptor]:
    return [registry.get(mid) for mid in registry._methods]


# --- mapping validation and suggestion ----------------------------------------

def validate_mapping(
    descriptor: AnalyticsMethodDescriptor,
    schema: Sequence[Column],
    mappings: MappingSet,
) -> IssueReport:
    """Every required input bound, every binding type-correct; empty report = ok."""
    report = IssueReport()
    columns = {c.name: c.type for c in schema}
    seen: set[str] = set()
    for input_name, column_name in mappings.bindings:
        if input_name in seen:
            report.add("DuplicateBinding", f"input {input_name!r} bound more than once", field=input_name)
            continue
        seen.add(input_name)
        inp = descriptor.input(input_name)
        if inp is None:
            report.add("UnknownInput", f"method has no input {input_name!r}", field=input_name)
            continue
        if column_name not in columns:
            report.add("UnknownColumn", f"no column {column_name!r} in the dataset", field=input_name)
            continue
        if columns[column_name] is not inp.type:
            report.add(
                "TypeMismatch",
                f"input {input_name!r} ({inp.type.value}) cannot take column "
                f"{column_name!r} ({columns[column_name].value})",
                field=input_name,
            )
    for inp in descriptor.inputs:
        if inp.required and inp.name not in seen:
            report.add("MissingRequiredInput", f"required input {inp.name!r} is not bound", field=inp.name)
    return report


def suggest_mappings(
    descriptor: AnalyticsMethodDescriptor, schema: Sequence[Column]
) -> MappingSet:
    """Deterministic greedy auto-mapping.

    Pass one binds inputs to columns with the exact same name and type;
    pass two binds each remaining input when exactly one unclaimed column
    of its type exists.  Ambiguous inputs stay unbound, so the suggestion
    never contains an invalid binding.
    """
    columns = {c.name: c.type for c in schema}
    bindings: list[tuple[str, str]] = []
    claimed: set[str] = set()

    for inp in descriptor.inputs:
        if columns.get(inp.name) is inp.type and inp.name not in claimed:
            bindings.append((inp.name, inp.name))
            claimed.add(inp.name)

    bound_inputs = {name for name, _ in bindings}
    for inp in descriptor.inputs:
        if inp.name in bound_inputs:
            continue
        candidates = [c.name for c in schema if c.type is inp.type and c.name not in claimed]
        if len(candidates) == 1:
            bindings.append((inp.name, candidates[0]))
            claimed.add(candidates[0])
    return MappingSet(tuple(bindings))


# --- execution -----------------------------------------------------------------

def resolve_parameters(
    descriptor: AnalyticsMethodDescriptor, values: Mapping[str, Scalar] | None
) -> dict[str, Scalar]:
    """Merge supplied parameter values over defaults, type-checking each."""
    values = dict(values or {})
    resolved: dict[str, Scalar] = {}
    for param in descriptor.parameters:
        if param.name not in values:
            resolved[param.name] = param.default
            continue
        value = values.pop(param.name)
        if param.type is ColumnType.NUMERIC:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise EngineError(
                    "ParameterOutOfRange", f"parameter {param.name!r} must be numeric, got {value!r}"
                )
            if isinstance(value, float):
                if not value.is_integer():
                    raise EngineError(
                        "ParameterOutOfRange", f"parameter {param.name!r} must be an integer"
                    )
                value = int(value)
        elif not isinstance(value, str):
            raise EngineError("ParameterOutOfRange", f"parameter {param.name!r} must be text")
        resolved[param.name] = value
    if values:
        raise EngineError(
            "ParameterOutOfRange", f"unknown parameters: {sorted(values)}"
        )
    return resolved


def execute_method(
    registry: MethodRegistry,
    method_id: str,
    table: DataTable,
    mappings: MappingSet,
    parameter_values: Mapping[str, Scalar] | None = None,
) -> DataTable:
    """Run one analytics method over a dataset table.

    The mapping must validate; unspecified parameters take their defaults.
    The result's schema always equals the descriptor's declared outputs.
    """
    descriptor = registry.get(method_id)
    report = validate_mapping(descriptor, table.columns, mappings)
    if report:
        raise EngineError("MappingInvalid", f"invalid mapping for {method_id}", issues=report)
    params = resolve_parameters(descriptor, parameter_values)

    bound: dict[str, int | None] = {}
    mapping = mappings.as_dict()
    for inp in descriptor.inputs:
        column = mapping.get(inp.name)
        bound[inp.name] = table.column_index(column) if column is not None else None

    rows = registry.implementation(method_id)(table, bound, params)
    return DataTable(descriptor.outputs, tuple(tuple(r) for r in rows))


def _rows_with_values(table: DataTable, indexes: Sequence[int]) -> list[tuple]:
    """Rows projected onto *indexes*, dropping any row with a missing cell
    in a bound column (incomplete records cannot be analyzed)."""
    out = []
    for row in table.rows:
        values = tuple(row[i] for i in indexes)
        if any(v is MISSING for v in values):
            continue
        out.append(values)
    return out


def iso_week(epoch_seconds: int | float) -> str:
    """ISO-8601 week label of a UTC timestamp, e.g. 2019-W01."""
    iso = datetime.fromtimestamp(int(epoch_seconds), tz=timezone.utc).isocalendar()
    return f"{iso[0]:04d}-W{iso[1]:02d}"


def _counts(pairs: list[tuple], distinct_users: bool) -> dict:
    """Count rows per key, or distinct users per key when a user value is
    attached as the last element of each tuple."""
    if not distinct_users:
        counts: dict = {}
        for key in pairs:
            counts[key] = counts.get(key, 0) + 1
        return counts
    users: dict = {}
    for *key, user in pairs:
        users.setdefault(tuple(key), set()).add(user)
    return {key: len(seen) for key, seen in users.items()}


# --- shipped method implementations ---------------------------------------------

def _impl_count_items(table, bound, params):
    items = _rows_with_values(table, [bound["Items to count"]])
    counts = _counts(items, distinct_users=False)
    return [(item, counts[(item,)]) for (item,) in sorted(counts)]


def _impl_count_items_per_week(table, bound, params):
    user_idx = bound["User"]
    if user_idx is None:
        pairs = _rows_with_values(table, [bound["Items to count"], bound["Timestamp"]])
        keyed = [(item, iso_week(ts)) for item, ts in pairs]
        counts = _counts(keyed, distinct_users=False)
    else:
        triples = _rows_with_values(table, [bound["Items to count"], bound["Timestamp"], user_idx])
        keyed = [(item, iso_week(ts), user) for item, ts, user in triples]
        counts = _counts(keyed, distinct_users=True)
    return [(item, week, counts[(item, week)]) for item, week in sorted(counts)]


def _impl_count_n_most(table, bound, params):
    n = params["N"]
    if n < 1:
        raise EngineError("ParameterOutOfRange", "N must be at least 1")
    user_idx = bound["User"]
    if user_idx is None:
        items = _rows_with_values(table, [bound["Items to count"]])
        counts = _counts(items, distinct_users=False)
    else:
        pairs = _rows_with_values(table, [bound["Items to count"], user_idx])
        counts = _counts(pairs, distinct_users=True)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(item, count) for (item,), count in ranked[:n]]


def _grouped_values(table, bound) -> dict:
    groups: dict = {}
    for group, value in _rows_with_values(table, [bound["Group"], bound["Value"]]):
        groups.setdefault(group, []).append(value)
    return groups


def _impl_sum_per_group(table, bound, params):
    groups = _grouped_values(table, bound)
    return [(g, math.fsum(vs) if any(isinstance(v, float) for v in vs) else sum(vs))
            for g, vs in sorted(groups.items())]


def _impl_average_per_group(table, bound, params):
    groups = _grouped_values(table, bound)
    return [(g, math.fsum(vs) / len(vs)) for g, vs in sorted(groups.items())]


def _impl_count_per_group(table, bound, params):
    items = _rows_with_values(table, [bound["Group"]])
    counts = _counts(items, distinct_users=False)
    return [(g, counts[(g,)]) for (g,) in sorted(counts)]


def _impl_pearson(table, bound, params):
    pairs = _rows_with_values(table, [bound["X"], bound["Y"]])
    if not pairs:
        raise EngineError("EmptyInput", "correlation needs at least one (X, Y) pair")
    n = len(pairs)
    xs = [float(x) for x, _ in pairs]
    ys = [float(y) for _, y in pairs]
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        return [(MISSING, n)]  # degenerate: no variance, correlation undefined
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return [(r, n)]


def _standardize(values: list[float]) -> list[float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    std = math.sqrt(var)
    if std == 0.0:
        return [0.0 for _ in values]
    return [(v - mean) / std for v in values]


def _impl_kmeans(table, bound, params):
    k, seed, max_iters = params["k"], params["seed"], params["max_iters"]
    if k < 1:
        raise EngineError("ParameterOutOfRange", "k must be at least 1")
    if max_iters < 1:
        raise EngineError("ParameterOutOfRange", "max_iters must be at least 1")

    f2_idx = bound["Feature2"]
    if f2_idx is None:
        records = _rows_with_values(table, [bound["Entity"], bound["Feature1"]])
        points = [[float(f1)] for _, f1 in records]
    else:
        records = _rows_with_values(table, [bound["Entity"], bound["Feature1"], f2_idx])
        points = [[float(f1), float(f2)] for _, f1, f2 in records]
    if not records:
        raise EngineError("EmptyInput", "clustering needs at least one complete row")
    n = len(points)
    if k > n:
        raise EngineError("ParameterOutOfRange", f"k={k} exceeds the {n} available points")

    dims = len(points[0])
    features = [_standardize([p[d] for p in points]) for d in range(dims)]
    std_points = [tuple(features[d][i] for d in range(dims)) for i in range(n)]

    def dist2(a, b):
        return sum((x - y) ** 2 for x, y in zip(a, b))

    # Farthest-point seeding from one seeded uniform pick keeps runs
    # reproducible and spreads the initial centroids across the data.
    rng = random.Random(seed)
    centroids = [std_points[rng.randrange(n)]]
    while len(centroids) < k:
        best_i, best_d = 0, -1.0
        for i, p in enumerate(std_points):
            d = min(dist2(p, c) for c in centroids)
            if d > best_d:
                best_i, best_d = i, d
        centroids.append(std_points[best_i])

    labels = [0] * n
    for _ in range(max_iters):
        changed = False
        for i, p in enumerate(std_points):
            best_j = min(range(k), key=lambda j: (dist2(p, centroids[j]), j))
            if labels[i] != best_j:
                labels[i] = best_j
                changed = True

        sums = [[0.0] * dims for _ in range(k)]
        counts = [0] * k
        for label, p in zip(labels, std_points):
            counts[label] += 1
            for d in range(dims):
                sums[label][d] += p[d]
        for j in range(k):
            if counts[j] == 0:
                # Re-seed an empty cluster from the point farthest from its centroid.
                far_i = max(range(n), key=lambda i: dist2(std_points[i], centroids[labels[i]]))
                centroids[j] = std_points[far_i]
            else:
                centroids[j] = tuple(s / counts[j] for s in sums[j])
        if not changed:
            break

    rows = []
    for record, label in zip(records, labels):
        entity, f1 = record[0], record[1]
        f2 = record[2] if f2_idx is not None else MISSING
        rows.append((entity, f"C{label}", f1, f2))
    return rows


def default_registry() -> MethodRegistry:
    """Registry of the shipped statistical and clustering methods."""
    registry = MethodRegistry()
    text, numeric = ColumnType.TEXT, ColumnType.NUMERIC

    registry.register(
        AnalyticsMethodDescriptor(
            "count_items",
            "Count items",
            inputs=(MethodInput("Items to count", text),),
            outputs=(Column("Item", text), Column("Count", numeric)),
        ),
        _impl_count_items,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "count_items_per_week",
            "Count items per week",
            inputs=(
                MethodInput("Items to count", text),
                MethodInput("User", text, required=False),
                MethodInput("Timestamp", numeric),
            ),
            outputs=(Column("Item", text), Column("Week", text), Column("Count", numeric)),
        ),
        _impl_count_items_per_week,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "count_n_most_occurring_items",
            "Count N most occurring items",
            inputs=(
                MethodInput("Items to count", text),
                MethodInput("User", text, required=False),
            ),
            outputs=(Column("Item", text), Column("Count", numeric)),
            parameters=(MethodParameter("N", numeric, 10),),
        ),
        _impl_count_n_most,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "sum_per_group",
            "Sum per group",
            inputs=(MethodInput("Group", text), MethodInput("Value", numeric)),
            outputs=(Column("Group", text), Column("Aggregate", numeric)),
        ),
        _impl_sum_per_group,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "average_per_group",
            "Average per group",
            inputs=(MethodInput("Group", text), MethodInput("Value", numeric)),
            outputs=(Column("Group", text), Column("Aggregate", numeric)),
        ),
        _impl_average_per_group,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "count_per_group",
            "Count per group",
            inputs=(MethodInput("Group", text),),
            outputs=(Column("Group", text), Column("Aggregate", numeric)),
        ),
        _impl_count_per_group,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "pearson_correlation",
            "Pearson correlation",
            inputs=(MethodInput("X", numeric), MethodInput("Y", numeric)),
            outputs=(Column("R", numeric), Column("Count", numeric)),
        ),
        _impl_pearson,
    )
    registry.register(
        AnalyticsMethodDescriptor(
            "kmeans_clustering",
            "K-means clustering",
            inputs=(
                MethodInput("Entity", text),
                MethodInput("Feature1", numeric),
                MethodInput("Feature2", numeric, required=False),
            ),
            outputs=(
                Column("Entity", text),
                Column("Cluster", text),
                Column("Feature1", numeric),
                Column("Feature2", numeric),
            ),
            parameters=(
                MethodParameter("k", numeric, 3),
                MethodParameter("seed", numeric, 42),
                MethodParameter("max_iters", numeric, 100),
            ),
        ),
        _impl_kmeans,
    )
    return registry
