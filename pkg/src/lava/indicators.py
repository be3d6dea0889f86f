"""Indicator execution: single pipelines, same-method combinations, and
two-level analyses merged on a common output column.

An executor is stateless: it reads one store snapshot, runs the stages
(query -> analysis -> visualization, plus merge/second-level for the
two-level kind) and labels any failure with the stage it happened in.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .charts import ChartChoice, ChartRegistry, render_chart, validate_viz_mapping
from .errors import EngineError, IssueReport
from .methods import (
    AnalyticsMethodDescriptor,
    MappingSet,
    MethodRegistry,
    execute_method,
    resolve_parameters,
    validate_mapping,
)
from .model import Column, ColumnType, DataTable, MISSING
from .store import DatasetScope, EventStore, FilterSet, check_filters, query_dataset

INDICATOR_COLUMN = "Indicator"


@dataclass(frozen=True)
class BasicIndicatorSpec:
    name: str
    scope: DatasetScope
    filters: FilterSet
    method_id: str
    parameters: tuple[tuple[str, object], ...] = ()
    mappings: MappingSet = MappingSet()
    chart: ChartChoice | None = None

    @staticmethod
    def build(name, scope, filters, method_id, parameters=None, mappings=None, chart=None):
        return BasicIndicatorSpec(
            name=name,
            scope=scope,
            filters=filters,
            method_id=method_id,
            parameters=tuple(sorted((parameters or {}).items())),
            mappings=mappings or MappingSet(),
            chart=chart,
        )

    def parameter_values(self) -> dict:
        return dict(self.parameters)


@dataclass(frozen=True)
class CompositeIndicatorSpec:
    """Two or more basic indicators sharing one analytics method; their
    results concatenate with an extra column naming the contributing part."""

    name: str
    parts: tuple[BasicIndicatorSpec, ...]
    chart: ChartChoice | None = None


@dataclass(frozen=True)
class MultiLevelIndicatorSpec:
    """First-level basic indicators merged on a common output column, then
    fed to a second analytics method."""

    name: str
    parts: tuple[BasicIndicatorSpec, ...]
    merge_attribute: str
    second_method_id: str
    second_parameters: tuple[tuple[str, object], ...] = ()
    second_mappings: MappingSet = MappingSet()
    chart: ChartChoice | None = None

    @staticmethod
    def build(name, parts, merge_attribute, second_method_id,
              second_parameters=None, second_mappings=None, chart=None):
        return MultiLevelIndicatorSpec(
            name=name,
            parts=tuple(parts),
            merge_attribute=merge_attribute,
            second_method_id=second_method_id,
            second_parameters=tuple(sorted((second_parameters or {}).items())),
            second_mappings=second_mappings or MappingSet(),
            chart=chart,
        )

    def parameter_values(self) -> dict:
        return dict(self.second_parameters)


@dataclass
class IndicatorResult:
    analyzed: DataTable
    chart: dict | None
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "analyzed": self.analyzed.to_doc(),
            "chart": self.chart,
            "timings": self.timings,
            "warnings": self.warnings,
        }


class Engine:
    """Binds the store and the method/chart registries behind the executors."""

    def __init__(self, store: EventStore, methods: MethodRegistry, charts: ChartRegistry):
        self.store = store
        self.methods = methods
        self.charts = charts

    # -- execution -------------------------------------------------------

    def execute_basic(self, spec: BasicIndicatorSpec, requester: str) -> IndicatorResult:
        table, timings = self._run_part(spec, requester)
        chart, t_viz = self._render(spec.chart, table, spec.name)
        timings["visualization"] = t_viz
        return IndicatorResult(table, chart, timings)

    def execute_composite(self, spec: CompositeIndicatorSpec, requester: str) -> IndicatorResult:
        if len(spec.parts) < 2:
            raise EngineError("MethodMismatch", "a composite needs at least two parts")
        method_ids = {p.method_id for p in spec.parts}
        if len(method_ids) != 1:
            raise EngineError(
                "MethodMismatch",
                f"all parts must share one analytics method, got {sorted(method_ids)}",
            )
        started = time.monotonic()
        tables = [self._run_labeled(part, requester)[0] for part in spec.parts]
        t_parts = time.monotonic() - started

        started = time.monotonic()
        schema = (Column(INDICATOR_COLUMN, ColumnType.TEXT),) + tables[0].columns
        rows = []
        for part, table in zip(spec.parts, tables):
            for row in table.rows:
                rows.append((part.name,) + row)
        combined = DataTable(schema, tuple(rows))
        t_combine = time.monotonic() - started

        chart, t_viz = self._render(spec.chart, combined, spec.name)
        return IndicatorResult(
            combined, chart,
            {"parts": t_parts, "combine": t_combine, "visualization": t_viz},
        )

    def execute_multilevel(self, spec: MultiLevelIndicatorSpec, requester: str) -> IndicatorResult:
        if len(spec.parts) < 2:
            raise EngineError("MergeAttributeMissing", "a multi-level indicator needs at least two parts")
        names = [p.name for p in spec.parts]
        if len(set(names)) != len(names):
            raise EngineError(
                "DuplicatePartName", f"part names must be unique for merging, got {names}",
                stage="merge",
            )
        started = time.monotonic()
        tables = [self._run_labeled(part, requester)[0] for part in spec.parts]
        t_first = time.monotonic() - started

        started = time.monotonic()
        joined = join_on_attribute(
            [(p.name, t) for p, t in zip(spec.parts, tables)], spec.merge_attribute
        )
        t_merge = time.monotonic() - started

        warnings = []
        descriptor = self.methods.get(spec.second_method_id)
        if not joined.rows:
            warnings.append("JoinEmpty: no rows share the merge attribute across all parts")
            second = DataTable(descriptor.outputs, ())
            t_second = 0.0
        else:
            started = time.monotonic()
            second = self._staged(
                "second-level",
                lambda: execute_method(
                    self.methods, spec.second_method_id, joined,
                    spec.second_mappings, spec.parameter_values(),
                ),
            )
            t_second = time.monotonic() - started

        chart, t_viz = self._render(spec.chart, second, spec.name)
        return IndicatorResult(
            second, chart,
            {"first-level": t_first, "merge": t_merge, "second-level": t_second, "visualization": t_viz},
            warnings,
        )

    # -- stage helpers -----------------------------------------------------

    def _run_part(self, spec: BasicIndicatorSpec, requester: str):
        timings: dict[str, float] = {}
        started = time.monotonic()
        table = self._staged(
            "query", lambda: query_dataset(self.store, spec.scope, spec.filters, requester)
        )
        timings["query"] = time.monotonic() - started
        started = time.monotonic()
        analyzed = self._staged(
            "analysis",
            lambda: execute_method(
                self.methods, spec.method_id, table, spec.mappings, spec.parameter_values()
            ),
        )
        timings["analysis"] = time.monotonic() - started
        return analyzed, timings

    def _run_labeled(self, part: BasicIndicatorSpec, requester: str):
        try:
            return self._run_part(part, requester)
        except EngineError as e:
            raise EngineError(
                e.code, f"part {part.name!r}: {e.message}", stage=e.stage, issues=e.issues
            ) from e

    def _render(self, choice: ChartChoice | None, table: DataTable, title: str):
        if choice is None:
            return None, 0.0
        started = time.monotonic()
        chart = self._staged(
            "visualization", lambda: render_chart(self.charts, choice, table, title)
        )
        return chart, time.monotonic() - started

    @staticmethod
    def _staged(stage: str, thunk):
        try:
            return thunk()
        except EngineError as e:
            if e.stage is None:
                e.stage = stage
            raise


def check_composable(
    first: BasicIndicatorSpec | str, candidates: Sequence[BasicIndicatorSpec]
) -> tuple[list[BasicIndicatorSpec], list[BasicIndicatorSpec]]:
    """Partition candidates by whether they can combine with the first
    selection (same analytics method).  The selection itself is excluded."""
    method_id = first if isinstance(first, str) else first.method_id
    compatible, incompatible = [], []
    for candidate in candidates:
        if candidate is first:
            continue
        (compatible if candidate.method_id == method_id else incompatible).append(candidate)
    return compatible, incompatible


def join_on_attribute(parts: Sequence[tuple[str, DataTable]], merge_attribute: str) -> DataTable:
    """Inner-join part outputs on a shared column.

    Non-key columns are renamed "<part name>: <column>" so same-named
    outputs from different parts stay distinguishable.  Rows with a missing
    key never join.  Raises MergeAttributeMissing when a part lacks the key
    or declares it with a different type.
    """
    key_type: ColumnType | None = None
    for name, table in parts:
        col = next((c for c in table.columns if c.name == merge_attribute), None)
        if col is None:
            raise EngineError(
                "MergeAttributeMissing",
                f"part {name!r} output has no column {merge_attribute!r}",
                stage="merge",
            )
        if key_type is None:
            key_type = col.type
        elif col.type is not key_type:
            raise EngineError(
                "MergeAttributeMissing",
                f"column {merge_attribute!r} is {col.type.value} in part {name!r}, "
                f"expected {key_type.value}",
                stage="merge",
            )

    columns: list[Column] = [Column(merge_attribute, key_type)]  # type: ignore[arg-type]
    for name, table in parts:
        for col in table.columns:
            if col.name != merge_attribute:
                columns.append(Column(f"{name}: {col.name}", col.type))

    first_name, first = parts[0]
    key_idx = first.column_index(merge_attribute)
    joined_rows = [
        ((row[key_idx],), row[:key_idx] + row[key_idx + 1:])
        for row in first.rows
        if row[key_idx] is not MISSING
    ]
    for name, table in parts[1:]:
        idx = table.column_index(merge_attribute)
        by_key: dict = {}
        for row in table.rows:
            key = row[idx]
            if key is MISSING:
                continue
            by_key.setdefault(key, []).append(row[:idx] + row[idx + 1:])
        joined_rows = [
            (key, rest + extra)
            for key, rest in joined_rows
            for extra in by_key.get(key[0], ())
        ]
    return DataTable(
        tuple(columns),
        tuple(key + rest for key, rest in joined_rows),
    )


def joined_schema(
    parts: Sequence[tuple[str, AnalyticsMethodDescriptor]], merge_attribute: str
) -> tuple[Column, ...] | None:
    """Static schema of the multilevel join, or None if the key is not
    common to every part's output with one type."""
    key_type: ColumnType | None = None
    for _, descriptor in parts:
        col = next((c for c in descriptor.outputs if c.name == merge_attribute), None)
        if col is None or (key_type is not None and col.type is not key_type):
            return None
        key_type = key_type or col.type
    columns = [Column(merge_attribute, key_type)]  # type: ignore[arg-type]
    for name, descriptor in parts:
        for col in descriptor.outputs:
            if col.name != merge_attribute:
                columns.append(Column(f"{name}: {col.name}", col.type))
    return tuple(columns)


# --- save-time validation ----------------------------------------------------

def validate_basic(
    spec: BasicIndicatorSpec,
    store: EventStore,
    methods: MethodRegistry,
    charts: ChartRegistry,
) -> IssueReport:
    """All invariants a basic indicator must satisfy before it can persist."""
    from .model import table_schema_for

    report = IssueReport()
    if not spec.name.strip():
        report.add("InvalidSpec", "indicator name must not be empty", field="name")
    try:
        check_filters(store, spec.scope, spec.filters)
    except EngineError as e:
        report.add(e.code, e.message)
    if spec.method_id not in methods:
        report.add("UnknownMethod", f"no analytics method {spec.method_id!r}", field="method_id")
        return report
    descriptor = methods.get(spec.method_id)
    schema = table_schema_for(spec.scope.categories, store.schemas)
    report.issues.extend(validate_mapping(descriptor, schema, spec.mappings).issues)
    try:
        resolve_parameters(descriptor, spec.parameter_values())
    except EngineError as e:
        report.add(e.code, e.message)
    if spec.chart is not None:
        report.issues.extend(validate_viz_mapping(charts, spec.chart, descriptor.outputs).issues)
    return report


def validate_composite(
    spec: CompositeIndicatorSpec,
    store: EventStore,
    methods: MethodRegistry,
    charts: ChartRegistry,
) -> IssueReport:
    report = IssueReport()
    if len(spec.parts) < 2:
        report.add("MethodMismatch", "a composite needs at least two parts", field="parts")
        return report
    method_ids = {p.method_id for p in spec.parts}
    if len(method_ids) != 1:
        report.add(
            "MethodMismatch",
            f"all parts must share one analytics method, got {sorted(method_ids)}",
            field="parts",
        )
        return report
    for part in spec.parts:
        part_report = validate_basic(part, store, methods, charts)
        for issue in part_report.issues:
            report.add(issue.code, f"part {part.name!r}: {issue.message}", field=issue.field)
    if spec.chart is not None and not report:
        descriptor = methods.get(spec.parts[0].method_id)
        schema = (Column(INDICATOR_COLUMN, ColumnType.TEXT),) + descriptor.outputs
        report.issues.extend(validate_viz_mapping(charts, spec.chart, schema).issues)
    return report


def validate_multilevel(
    spec: MultiLevelIndicatorSpec,
    store: EventStore,
    methods: MethodRegistry,
    charts: ChartRegistry,
) -> IssueReport:
    report = IssueReport()
    if len(spec.parts) < 2:
        report.add("MergeAttributeMissing", "a multi-level indicator needs at least two parts", field="parts")
        return report
    names = [p.name for p in spec.parts]
    if len(set(names)) != len(names):
        report.add("DuplicatePartName", f"part names must be unique, got {names}", field="parts")
    for part in spec.parts:
        part_report = validate_basic(part, store, methods, charts)
        for issue in part_report.issues:
            report.add(issue.code, f"part {part.name!r}: {issue.message}", field=issue.field)
    if spec.second_method_id not in methods:
        report.add("UnknownMethod", f"no analytics method {spec.second_method_id!r}", field="second_method_id")
        return report
    if report:
        return report

    descriptors = [(p.name, methods.get(p.method_id)) for p in spec.parts]
    schema = joined_schema(descriptors, spec.merge_attribute)
    if schema is None:
        report.add(
            "MergeAttributeMissing",
            f"column {spec.merge_attribute!r} is not a common output of every part",
            field="merge_attribute",
        )
        return report
    second = methods.get(spec.second_method_id)
    report.issues.extend(validate_mapping(second, schema, spec.second_mappings).issues)
    try:
        resolve_parameters(second, spec.parameter_values())
    except EngineError as e:
        report.add(e.code, e.message)
    if spec.chart is not None:
        report.issues.extend(validate_viz_mapping(charts, spec.chart, second.outputs).issues)
    return report
