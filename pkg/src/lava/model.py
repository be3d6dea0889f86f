"""Core domain model: learning events, category schemas, and typed tables.

Every value flowing through the pipeline is either Text or Numeric; the
same two-type system governs event attributes, table columns, analytics
method inputs/outputs, and chart roles.  Timestamps travel on the wire as
ISO-8601 UTC strings and live internally as epoch seconds so they behave
as Numeric columns everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import EngineError, IssueReport

#: Distinguished marker for a missing cell. Kept as None so JSON round-trips as null.
MISSING = None

Scalar = Any  # str | int | float | None (MISSING)


class ColumnType(str, Enum):
    """Closed two-type system for all columns, inputs and outputs."""

    TEXT = "Text"
    NUMERIC = "Numeric"


def scalar_matches(value: Scalar, ctype: ColumnType) -> bool:
    """True if *value* is a valid cell for a column of type *ctype*.

    The missing marker is accepted in either type.  Booleans are rejected
    outright: callers must encode them onto Text or Numeric explicitly.
    """
    if value is MISSING:
        return True
    if isinstance(value, bool):
        return False
    if ctype is ColumnType.TEXT:
        return isinstance(value, str)
    return isinstance(value, (int, float)) and math.isfinite(value)


@dataclass(frozen=True)
class Column:
    name: str
    type: ColumnType

    def to_doc(self) -> dict:
        return {"name": self.name, "type": self.type.value}

    @staticmethod
    def from_doc(doc: Mapping) -> "Column":
        return Column(str(doc["name"]), ColumnType(doc["type"]))


@dataclass(frozen=True)
class DataTable:
    """Immutable typed columnar table flowing between pipeline stages.

    Invariants (enforced at construction): unique column names, every row
    has one cell per column, every cell matches its column type or is the
    missing marker.
    """

    columns: tuple[Column, ...]
    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names: {names}")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
            for col, cell in zip(self.columns, row):
                if not scalar_matches(cell, col.type):
                    raise ValueError(
                        f"row {i}, column {col.name!r}: {cell!r} is not {col.type.value}"
                    )

    @staticmethod
    def build(columns: Iterable[Column | tuple], rows: Iterable[Iterable[Scalar]]) -> "DataTable":
        cols = tuple(c if isinstance(c, Column) else Column(c[0], ColumnType(c[1])) for c in columns)
        return DataTable(cols, tuple(tuple(r) for r in rows))

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise KeyError(name)

    def column_values(self, name: str) -> list[Scalar]:
        i = self.column_index(name)
        return [row[i] for row in self.rows]

    def schema(self) -> tuple[Column, ...]:
        return self.columns

    def to_doc(self) -> dict:
        return {
            "columns": [c.to_doc() for c in self.columns],
            "rows": [list(r) for r in self.rows],
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "DataTable":
        return DataTable.build(
            [Column.from_doc(c) for c in doc["columns"]],
            doc["rows"],
        )


@dataclass(frozen=True)
class CategorySchema:
    """Declares which semantic attributes events of a category may carry."""

    category: str
    attributes: tuple[Column, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate attribute names in {self.category!r}: {names}")

    def attribute_type(self, name: str) -> ColumnType | None:
        for a in self.attributes:
            if a.name == name:
                return a.type
        return None

    def to_doc(self) -> dict:
        return {"category": self.category, "attributes": [a.to_doc() for a in self.attributes]}

    @staticmethod
    def from_doc(doc: Mapping) -> "CategorySchema":
        return CategorySchema(
            str(doc["category"]),
            tuple(Column.from_doc(a) for a in doc["attributes"]),
        )


def schema_map(schemas: Iterable[CategorySchema]) -> dict[str, CategorySchema]:
    return {s.category: s for s in schemas}


#: Categories every fresh deployment knows about. Editable per deployment
#: via the data directory's schemas file.
DEFAULT_SCHEMAS: tuple[CategorySchema, ...] = (
    CategorySchema(
        "Learning Materials",
        (
            Column("Name", ColumnType.TEXT),
            Column("File Extension", ColumnType.TEXT),
            Column("Size (in Bytes)", ColumnType.NUMERIC),
        ),
    ),
    CategorySchema(
        "Assignments",
        (
            Column("Title", ColumnType.TEXT),
            Column("Total Marks", ColumnType.NUMERIC),
            Column("Due Date", ColumnType.TEXT),
            Column("Points", ColumnType.NUMERIC),
        ),
    ),
    CategorySchema(
        "Discussion Forum",
        (
            Column("Thread", ColumnType.TEXT),
            Column("Post Length", ColumnType.NUMERIC),
        ),
    ),
    CategorySchema(
        "Wiki",
        (
            Column("Page", ColumnType.TEXT),
        ),
    ),
)


# --- timestamps ------------------------------------------------------------

def parse_timestamp(value: Any) -> int:
    """Parse an ISO-8601 UTC wire timestamp into epoch seconds.

    Accepts 'Z' or explicit offsets; naive values are read as UTC.
    Sub-second precision is truncated.  Raises EngineError(BadTimestamp).
    """
    if not isinstance(value, str) or not value.strip():
        raise EngineError("BadTimestamp", f"timestamp must be an ISO-8601 string, got {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise EngineError("BadTimestamp", f"unparseable timestamp {value!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    epoch = dt.timestamp()
    if not math.isfinite(epoch):
        raise EngineError("BadTimestamp", f"non-finite timestamp {value!r}")
    return int(epoch)


def format_timestamp(epoch_seconds: int | float) -> str:
    """Render epoch seconds as the canonical wire form (second precision, Z suffix)."""
    dt = datetime.fromtimestamp(int(epoch_seconds), tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


# --- events ----------------------------------------------------------------

@dataclass(frozen=True)
class LearningEvent:
    """One activity record: who did what, on which object category, where, when.

    ``attributes`` carries the category-specific semantic context (e.g. the
    file name a student viewed) and is immutable after construction.
    """

    event_id: str
    user_id: str
    timestamp: int  # epoch seconds, UTC
    source: str
    platform: str
    action: str
    category: str
    attributes: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    def __eq__(self, other):
        if not isinstance(other, LearningEvent):
            return NotImplemented
        return self.to_doc() == other.to_doc()

    def __hash__(self):
        return hash((self.event_id, self.user_id, self.timestamp, self.source,
                     self.platform, self.action, self.category,
                     tuple(sorted(self.attributes.items()))))

    def to_doc(self) -> dict:
        """Serialize to the wire format (field names are normative)."""
        return {
            "id": self.event_id,
            "user": self.user_id,
            "timestamp": format_timestamp(self.timestamp),
            "source": self.source,
            "platform": self.platform,
            "action": self.action,
            "category": self.category,
            "attributes": dict(self.attributes),
        }


#: Wire fields that must be present and non-empty on every event document.
WIRE_FIELDS = ("id", "user", "timestamp", "source", "platform", "action", "category")


def parse_event_document(doc: Any) -> LearningEvent | IssueReport:
    """Parse one wire document into a LearningEvent.

    Returns the event, or an IssueReport listing every structural problem
    (missing fields, bad timestamp, non-scalar attribute values).  Schema
    conformance is checked separately by :func:`validate_event`.
    """
    report = IssueReport()
    if not isinstance(doc, Mapping):
        report.add("MalformedDocument", f"event document must be an object, got {type(doc).__name__}")
        return report

    values: dict[str, str] = {}
    for name in WIRE_FIELDS:
        raw = doc.get(name)
        if name == "timestamp":
            continue
        if not isinstance(raw, str) or not raw.strip():
            report.add("MissingRequiredField", f"field {name!r} missing or empty", field=name)
        else:
            values[name] = raw

    timestamp = None
    if "timestamp" not in doc:
        report.add("MissingRequiredField", "field 'timestamp' missing or empty", field="timestamp")
    else:
        try:
            timestamp = parse_timestamp(doc["timestamp"])
        except EngineError as e:
            report.add(e.code, e.message, field="timestamp")

    attributes = doc.get("attributes", {})
    if attributes is None:
        attributes = {}
    if not isinstance(attributes, Mapping):
        report.add("MalformedDocument", "attributes must be an object", field="attributes")
        attributes = {}
    clean_attrs: dict[str, Scalar] = {}
    for key, value in attributes.items():
        if not isinstance(key, str):
            report.add("MalformedDocument", f"attribute key {key!r} is not a string", field="attributes")
            continue
        if isinstance(value, bool) or not (
            value is None or isinstance(value, (str, int, float))
        ):
            report.add(
                "AttributeTypeMismatch",
                f"attribute {key!r} value {value!r} is not a Text or Numeric scalar",
                field=key,
            )
            continue
        if isinstance(value, float) and not math.isfinite(value):
            report.add("AttributeTypeMismatch", f"attribute {key!r} is not finite", field=key)
            continue
        if value is not None:
            clean_attrs[key] = value

    if report:
        return report
    return LearningEvent(
        event_id=values["id"],
        user_id=values["user"],
        timestamp=timestamp,  # type: ignore[arg-type]
        source=values["source"],
        platform=values["platform"],
        action=values["action"],
        category=values["category"],
        attributes=clean_attrs,
    )


def validate_event(
    event: LearningEvent, schemas: Mapping[str, CategorySchema] | Iterable[CategorySchema]
) -> LearningEvent | IssueReport:
    """Check an event against the category schemas.

    Returns the event unchanged when every invariant holds, otherwise a
    report listing each violation: unknown category, attribute keys not
    declared by the schema, or attribute values of the wrong type.
    """
    if not isinstance(schemas, Mapping):
        schemas = schema_map(schemas)
    report = IssueReport()
    schema = schemas.get(event.category)
    if schema is None:
        report.add("UnknownCategory", f"category {event.category!r} has no schema", field="category")
        return report
    for name, value in event.attributes.items():
        declared = schema.attribute_type(name)
        if declared is None:
            report.add(
                "AttributeTypeMismatch",
                f"attribute {name!r} not declared for category {event.category!r}",
                field=name,
            )
        elif not scalar_matches(value, declared):
            report.add(
                "AttributeTypeMismatch",
                f"attribute {name!r} value {value!r} is not {declared.value}",
                field=name,
            )
    if report:
        return report
    return event


# --- events -> table -------------------------------------------------------

#: Fixed leading columns of every dataset table.
BASE_COLUMNS: tuple[Column, ...] = (
    Column("Event Id", ColumnType.TEXT),
    Column("User", ColumnType.TEXT),
    Column("Timestamp", ColumnType.NUMERIC),
    Column("Source", ColumnType.TEXT),
    Column("Platform", ColumnType.TEXT),
    Column("Action", ColumnType.TEXT),
    Column("Category", ColumnType.TEXT),
)


def common_attributes(
    categories: Iterable[str], schemas: Mapping[str, CategorySchema] | Iterable[CategorySchema]
) -> tuple[Column, ...]:
    """Attribute columns shared by every requested category, sorted by name.

    A category without a schema contributes no attributes, so its presence
    empties the intersection.  The result depends only on the category set.
    """
    if not isinstance(schemas, Mapping):
        schemas = schema_map(schemas)
    cats = sorted(set(categories))
    if not cats:
        return ()
    common: dict[str, ColumnType] | None = None
    for cat in cats:
        schema = schemas.get(cat)
        attrs = {a.name: a.type for a in schema.attributes} if schema else {}
        if common is None:
            common = attrs
        else:
            common = {
                name: ctype
                for name, ctype in common.items()
                if attrs.get(name) == ctype
            }
    assert common is not None
    return tuple(Column(name, common[name]) for name in sorted(common))


def table_schema_for(
    categories: Iterable[str], schemas: Mapping[str, CategorySchema] | Iterable[CategorySchema]
) -> tuple[Column, ...]:
    return BASE_COLUMNS + common_attributes(categories, schemas)


def events_to_table(
    events: Iterable[LearningEvent],
    categories: Iterable[str],
    schemas: Mapping[str, CategorySchema] | Iterable[CategorySchema],
) -> DataTable:
    """Materialize events as a typed table.

    Columns are the fixed base columns plus one column per attribute common
    to all requested categories; events lacking a value get the missing
    marker.  Row order equals input order.
    """
    columns = table_schema_for(categories, schemas)
    attr_cols = columns[len(BASE_COLUMNS):]
    rows = []
    for e in events:
        row = [e.event_id, e.user_id, e.timestamp, e.source, e.platform, e.action, e.category]
        for col in attr_cols:
            row.append(e.attributes.get(col.name, MISSING))
        rows.append(tuple(row))
    return DataTable(columns, tuple(rows))
