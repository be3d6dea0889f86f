"""Indicator spec documents: the persisted/wire form and its resolution.

Catalog records and API payloads carry indicator definitions as plain JSON
documents; this module parses them into executable spec objects, resolving
composite and multi-level part references through the catalog.  Part
entries may be indicator ids (persisted form) or inline basic documents
(preview form).
"""

from __future__ import annotations

from typing import Any, Mapping

from .catalog import Catalog, IndicatorRecord, KIND_BASIC, KIND_COMPOSITE, KIND_MULTILEVEL
from .charts import ChartChoice
from .errors import EngineError
from .indicators import BasicIndicatorSpec, CompositeIndicatorSpec, MultiLevelIndicatorSpec
from .methods import MappingSet
from .model import parse_timestamp
from .store import DatasetScope, FilterSet, PrivacyMode


def _require(doc: Mapping, field: str, kind: str):
    value = doc.get(field)
    if value is None:
        raise EngineError("InvalidSpec", f"{kind} spec needs a {field!r} field")
    return value


def _as_instant(value: Any) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool):
        raise EngineError("BadTimestamp", f"bad time bound {value!r}")
    if isinstance(value, (int, float)):
        return int(value)
    return parse_timestamp(value)


def scope_from_doc(doc: Mapping) -> DatasetScope:
    return DatasetScope.build(
        doc.get("sources", ()),
        doc.get("platforms", ()),
        doc.get("actions", ()),
        doc.get("categories", ()),
    )


def filters_from_doc(doc: Mapping) -> FilterSet:
    try:
        mode = PrivacyMode(doc.get("privacy_mode", PrivacyMode.EVERYONE_ANONYMIZED))
    except ValueError:
        raise EngineError(
            "InvalidSpec",
            f"privacy_mode must be one of {[m.value for m in PrivacyMode]}",
        ) from None
    return FilterSet.build(
        [
            (f["attribute"], f.get("values", ()))
            for f in doc.get("attribute_filters", ())
        ],
        _as_instant(doc.get("time_start")),
        _as_instant(doc.get("time_end")),
        mode,
    )


def chart_from_doc(doc: Mapping | None) -> ChartChoice | None:
    if doc is None:
        return None
    return ChartChoice.build(
        str(_require(doc, "library_id", "chart")),
        str(_require(doc, "chart_type", "chart")),
        dict(doc.get("viz_mappings", {})),
    )


def basic_from_doc(doc: Mapping) -> BasicIndicatorSpec:
    return BasicIndicatorSpec.build(
        name=str(_require(doc, "name", "basic")),
        scope=scope_from_doc(_require(doc, "scope", "basic")),
        filters=filters_from_doc(doc.get("filters", {})),
        method_id=str(_require(doc, "method_id", "basic")),
        parameters=dict(doc.get("parameters", {})),
        mappings=MappingSet.build(doc.get("mappings", {})),
        chart=chart_from_doc(doc.get("chart")),
    )


def _resolve_part(entry: Any, catalog: Catalog | None) -> BasicIndicatorSpec:
    if isinstance(entry, str):
        if catalog is None:
            raise EngineError("InvalidSpec", "part references need a catalog to resolve")
        record = catalog.find_indicator(entry)
        if record is None:
            raise EngineError("UnknownIndicator", f"part {entry!r} does not exist")
        if record.kind != KIND_BASIC:
            raise EngineError("InvalidSpec", f"part {entry!r} is not a basic indicator")
        return basic_from_doc(record.spec)
    if isinstance(entry, Mapping):
        return basic_from_doc(entry)
    raise EngineError("InvalidSpec", f"part must be an indicator id or an inline spec, got {entry!r}")


def composite_from_doc(doc: Mapping, catalog: Catalog | None = None) -> CompositeIndicatorSpec:
    parts = _require(doc, "parts", "composite")
    return CompositeIndicatorSpec(
        name=str(_require(doc, "name", "composite")),
        parts=tuple(_resolve_part(p, catalog) for p in parts),
        chart=chart_from_doc(doc.get("chart")),
    )


def multilevel_from_doc(doc: Mapping, catalog: Catalog | None = None) -> MultiLevelIndicatorSpec:
    parts = _require(doc, "parts", "multilevel")
    return MultiLevelIndicatorSpec.build(
        name=str(_require(doc, "name", "multilevel")),
        parts=tuple(_resolve_part(p, catalog) for p in parts),
        merge_attribute=str(_require(doc, "merge_attribute", "multilevel")),
        second_method_id=str(_require(doc, "second_method_id", "multilevel")),
        second_parameters=dict(doc.get("second_parameters", {})),
        second_mappings=MappingSet.build(doc.get("second_mappings", {})),
        chart=chart_from_doc(doc.get("chart")),
    )


def spec_from_doc(kind: str, doc: Mapping, catalog: Catalog | None = None):
    """Parse a spec document of the given kind into its executable form."""
    if kind == KIND_BASIC:
        return basic_from_doc(doc)
    if kind == KIND_COMPOSITE:
        return composite_from_doc(doc, catalog)
    if kind == KIND_MULTILEVEL:
        return multilevel_from_doc(doc, catalog)
    raise EngineError("InvalidSpec", f"unknown indicator kind {kind!r}")


def resolve_record(record: IndicatorRecord, catalog: Catalog):
    return spec_from_doc(record.kind, record.spec, catalog)
