"""Declarative chart specs: typed chart roles, mapping checks, rendering.

A chart family (visualization library) supports a set of chart types;
each type declares typed roles (x, y, series, ...).  Rendering pivots an
analyzed table into an engine-neutral document that any client-side
adapter can draw — the engine never touches a concrete charting toolkit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable, Mapping, Sequence

from .errors import EngineError, IssueReport
from .model import Column, ColumnType, DataTable, MISSING

CHART_TYPES = ("bar", "pie", "line", "box_plot", "scatter", "stacked_area")

#: Label used when a categorical cell is missing; keeps plotted sums equal
#: to column sums instead of silently dropping rows.
MISSING_LABEL = "(missing)"

_WEEK_RE = re.compile(r"^\d{4}-W\d{2}$")


@dataclass(frozen=True)
class ChartRole:
    role: str
    type: ColumnType
    required: bool = True

    def to_doc(self) -> dict:
        return {"role": self.role, "type": self.type.value, "required": self.required}


_TEXT, _NUMERIC = ColumnType.TEXT, ColumnType.NUMERIC

_ROLES: dict[str, tuple[ChartRole, ...]] = {
    "bar": (ChartRole("x", _TEXT), ChartRole("y", _NUMERIC), ChartRole("series", _TEXT, False)),
    "line": (ChartRole("x", _TEXT), ChartRole("y", _NUMERIC), ChartRole("series", _TEXT, False)),
    "stacked_area": (ChartRole("x", _TEXT), ChartRole("y", _NUMERIC), ChartRole("series", _TEXT)),
    "pie": (ChartRole("label", _TEXT), ChartRole("value", _NUMERIC)),
    "scatter": (
        ChartRole("x", _NUMERIC),
        ChartRole("y", _NUMERIC),
        ChartRole("series", _TEXT, False),
        ChartRole("label", _TEXT, False),
    ),
    "box_plot": (ChartRole("value", _NUMERIC), ChartRole("group", _TEXT, False)),
}


@dataclass(frozen=True)
class ChartFamily:
    library_id: str
    name: str
    chart_types: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "library_id": self.library_id,
            "name": self.name,
            "charts": [
                {"chart_type": ct, "roles": [r.to_doc() for r in _ROLES[ct]]}
                for ct in self.chart_types
            ],
        }


#: Two interchangeable render targets; clients pick an adapter by library_id.
DEFAULT_FAMILIES: tuple[ChartFamily, ...] = (
    ChartFamily("c3js", "C3/D3.js", ("bar", "pie", "line", "scatter", "stacked_area")),
    ChartFamily("googlecharts", "Google Charts", ("bar", "pie", "line", "scatter", "box_plot")),
)


@dataclass(frozen=True)
class ChartChoice:
    """A chart family + type + role-to-column mapping chosen for an indicator."""

    library_id: str
    chart_type: str
    viz_mappings: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def build(library_id: str, chart_type: str, viz_mappings: Mapping[str, str]) -> "ChartChoice":
        return ChartChoice(library_id, chart_type, tuple(sorted(viz_mappings.items())))

    def mapping(self) -> dict[str, str]:
        return dict(self.viz_mappings)

    def to_doc(self) -> dict:
        return {
            "library_id": self.library_id,
            "chart_type": self.chart_type,
            "viz_mappings": self.mapping(),
        }

    @staticmethod
    def from_doc(doc) -> "ChartChoice":
        return ChartChoice.build(doc["library_id"], doc["chart_type"], doc.get("viz_mappings", {}))


class ChartRegistry:
    def __init__(self, families: Iterable[ChartFamily] = DEFAULT_FAMILIES):
        self._families = {f.library_id: f for f in families}

    def families(self) -> list[ChartFamily]:
        return list(self._families.values())

    def roles_for(self, library_id: str, chart_type: str) -> tuple[ChartRole, ...] | None:
        family = self._families.get(library_id)
        if family is None or chart_type not in family.chart_types:
            return None
        return _ROLES[chart_type]


def list_chart_types(registry: ChartRegistry, library_id: str | None = None) -> list[dict]:
    """Chart families with their types and typed roles; unknown family -> empty."""
    families = registry.families()
    if library_id is not None:
        families = [f for f in families if f.library_id == library_id]
    return [f.to_doc() for f in families]


def validate_viz_mapping(
    registry: ChartRegistry, choice: ChartChoice, schema: Sequence[Column]
) -> IssueReport:
    """Same rules as analytics mapping validation, applied to chart roles."""
    report = IssueReport()
    roles = registry.roles_for(choice.library_id, choice.chart_type)
    if roles is None:
        report.add(
            "UnsupportedChartType",
            f"library {choice.library_id!r} does not provide chart type {choice.chart_type!r}",
        )
        return report
    by_role = {r.role: r for r in roles}
    columns = {c.name: c.type for c in schema}
    bound: set[str] = set()
    for role_name, column_name in choice.viz_mappings:
        role = by_role.get(role_name)
        if role is None:
            report.add("UnknownInput", f"chart has no role {role_name!r}", field=role_name)
            continue
        bound.add(role_name)
        if column_name not in columns:
            report.add("UnknownColumn", f"no column {column_name!r} in the analyzed table", field=role_name)
        elif columns[column_name] is not role.type:
            report.add(
                "TypeMismatch",
                f"role {role_name!r} ({role.type.value}) cannot take column "
                f"{column_name!r} ({columns[column_name].value})",
                field=role_name,
            )
    for role in roles:
        if role.required and role.role not in bound:
            report.add("MissingRequiredInput", f"required role {role.role!r} is not bound", field=role.role)
    return report


# --- rendering -----------------------------------------------------------------

def _week_successor(week: str) -> str:
    year, number = int(week[:4]), int(week[6:])
    monday = date.fromisocalendar(year, number, 1) + timedelta(weeks=1)
    iso = monday.isocalendar()
    return f"{iso[0]:04d}-W{iso[1]:02d}"


def _week_domain(values: list[str]) -> list[str]:
    """Chronological ISO-week domain from min to max with gaps zero-filled."""
    ordered = sorted(values)
    domain = [ordered[0]]
    while domain[-1] < ordered[-1]:
        domain.append(_week_successor(domain[-1]))
    return domain


def _text_cell(value) -> str:
    return MISSING_LABEL if value is MISSING else str(value)


def render_chart(
    registry: ChartRegistry, choice: ChartChoice, table: DataTable, title: str = ""
) -> dict:
    """Pivot an analyzed table into a declarative chart document.

    Categorical domains keep first-appearance order, except ISO-week values
    which are ordered chronologically with missing weeks zero-filled.
    Duplicate (x, series) contributions are summed, so the plotted total
    always equals the bound value column's total.
    """
    report = validate_viz_mapping(registry, choice, table.columns)
    if report:
        raise EngineError("VizMappingInvalid", "invalid visualization mapping", issues=report)

    mapping = choice.mapping()
    chart_type = choice.chart_type

    def column(role: str):
        name = mapping.get(role)
        return None if name is None else table.column_values(name)

    spec: dict = {
        "chart_type": chart_type,
        "library": choice.library_id,
        "title": title,
        "x_label": "",
        "y_label": "",
        "domain": [],
        "series": [],
    }

    if chart_type in ("bar", "line", "stacked_area"):
        xs = [_text_cell(v) for v in column("x")]
        ys = column("y")
        series_col = column("series")
        names = [_text_cell(v) for v in series_col] if series_col is not None else None
        spec["x_label"] = mapping["x"]
        spec["y_label"] = mapping["y"]

        unique_x = list(dict.fromkeys(xs))
        if unique_x and all(_WEEK_RE.match(x) for x in unique_x):
            domain = _week_domain(unique_x)
        else:
            domain = unique_x
        x_pos = {x: i for i, x in enumerate(domain)}

        series_names = (
            list(dict.fromkeys(names)) if names is not None else [mapping["y"]]
        )
        values = {name: [0] * len(domain) for name in series_names}
        for i, (x, y) in enumerate(zip(xs, ys)):
            if y is MISSING:
                continue
            name = names[i] if names is not None else mapping["y"]
            values[name][x_pos[x]] += y
        spec["domain"] = domain
        spec["series"] = [{"name": name, "values": values[name]} for name in series_names]

    elif chart_type == "pie":
        labels = [_text_cell(v) for v in column("label")]
        values_col = column("value")
        spec["x_label"] = mapping["label"]
        spec["y_label"] = mapping["value"]
        domain = list(dict.fromkeys(labels))
        totals = {label: 0 for label in domain}
        for label, value in zip(labels, values_col):
            if value is MISSING:
                continue
            totals[label] += value
        spec["domain"] = domain
        spec["series"] = [{"name": mapping["value"], "values": [totals[l] for l in domain]}]

    elif chart_type == "scatter":
        xs, ys = column("x"), column("y")
        series_col = column("series")
        label_col = column("label")
        spec["x_label"] = mapping["x"]
        spec["y_label"] = mapping["y"]
        names = [_text_cell(v) for v in series_col] if series_col is not None else None
        series_names = list(dict.fromkeys(names)) if names is not None else [mapping["y"]]
        points: dict[str, list] = {name: [] for name in series_names}
        labels: dict[str, list] = {name: [] for name in series_names}
        for i, (x, y) in enumerate(zip(xs, ys)):
            if x is MISSING or y is MISSING:
                continue
            name = names[i] if names is not None else mapping["y"]
            points[name].append([x, y])
            if label_col is not None:
                labels[name].append(_text_cell(label_col[i]))
        spec["series"] = [
            {"name": name, "points": points[name], **({"labels": labels[name]} if label_col is not None else {})}
            for name in series_names
        ]

    elif chart_type == "box_plot":
        values_col = column("value")
        group_col = column("group")
        spec["y_label"] = mapping["value"]
        if group_col is not None:
            spec["x_label"] = mapping["group"]
            names = [_text_cell(v) for v in group_col]
            grouped: dict[str, list[float]] = {}
            order = list(dict.fromkeys(names))
            for name, value in zip(names, values_col):
                if value is not MISSING:
                    grouped.setdefault(name, []).append(value)
            spec["domain"] = [n for n in order if n in grouped]
        else:
            data = [v for v in values_col if v is not MISSING]
            grouped = {mapping["value"]: data} if data else {}
            spec["domain"] = list(grouped)
        spec["series"] = [
            {"name": name, "summary": five_number_summary(grouped[name])}
            for name in spec["domain"]
        ]

    return spec


def _tukey_median(sorted_values: Sequence[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2:
        return float(sorted_values[mid])
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2


def five_number_summary(values: Sequence[float]) -> dict:
    """Tukey hinges with 1.5*IQR whiskers; values beyond whiskers are outliers."""
    data = sorted(float(v) for v in values)
    n = len(data)
    median = _tukey_median(data)
    half = (n + 1) // 2  # hinges include the median position when n is odd
    q1 = _tukey_median(data[:half])
    q3 = _tukey_median(data[n - half:])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = [v for v in data if lo_fence <= v <= hi_fence]
    outliers = [v for v in data if v < lo_fence or v > hi_fence]
    return {
        "low": inside[0] if inside else median,
        "q1": q1,
        "median": median,
        "q3": q3,
        "high": inside[-1] if inside else median,
        "outliers": outliers,
    }


def validate_chart_spec(spec: Mapping) -> IssueReport:
    """Structural check used by tests and the render endpoint contract."""
    report = IssueReport()
    if spec.get("chart_type") not in CHART_TYPES:
        report.add("UnsupportedChartType", f"bad chart_type {spec.get('chart_type')!r}")
        return report
    domain = spec.get("domain", [])
    for series in spec.get("series", []):
        if "values" in series:
            if len(series["values"]) != len(domain):
                report.add(
                    "InconsistentSeries",
                    f"series {series.get('name')!r} has {len(series['values'])} values "
                    f"for a domain of {len(domain)}",
                )
            bad = [v for v in series["values"] if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v)]
            if bad:
                report.add("NonFiniteValue", f"series {series.get('name')!r} has non-finite values {bad[:3]}")
        if "points" in series:
            for point in series["points"]:
                if any(isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c) for c in point):
                    report.add("NonFiniteValue", f"series {series.get('name')!r} has a non-finite point {point}")
                    break
    return report
