"""Pydantic request/response models for the HTTP API.

Event documents and indicator spec documents are deliberately loose dicts:
the engine validates them itself and reports every violation per item,
which a strict schema would collapse into one opaque 422.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class ScopeModel(BaseModel):
    sources: list[str] = Field(default_factory=list)
    platforms: list[str] = Field(default_factory=list)
    actions: list[str] = Field(default_factory=list)
    categories: list[str] = Field(default_factory=list)


class AttributeFilterModel(BaseModel):
    attribute: str
    values: list[Any] = Field(default_factory=list)


class FiltersModel(BaseModel):
    attribute_filters: list[AttributeFilterModel] = Field(default_factory=list)
    time_start: str | int | None = None
    time_end: str | int | None = None
    privacy_mode: str = "everyone_anonymized"


class QueryRequest(BaseModel):
    scope: ScopeModel
    filters: FiltersModel = Field(default_factory=FiltersModel)


class ColumnModel(BaseModel):
    name: str
    type: str


class SuggestMappingsRequest(BaseModel):
    method_id: str
    columns: list[ColumnModel]


class PreviewRequest(BaseModel):
    kind: str = "basic"
    spec: dict


class GoalRequestModel(BaseModel):
    name: str
    description: str = ""


class GoalReviewModel(BaseModel):
    decision: str


class QuestionCreateModel(BaseModel):
    goal_id: str
    text: str


class AssociateModel(BaseModel):
    indicator_id: str


class IndicatorCreateModel(BaseModel):
    kind: str
    spec: dict


class IndicatorUpdateModel(BaseModel):
    spec: dict


class IngestRejectionModel(BaseModel):
    index: int
    issues: list[dict]


class IngestReportModel(BaseModel):
    accepted: int
    rejected: int
    rejections: list[IngestRejectionModel]
