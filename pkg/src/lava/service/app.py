"""The HTTP service: every engine capability behind a JSON API under /api/v1.

The service wraps one data directory (event store + catalog + secrets);
all state lives in the engine objects, so the app factory can be stood up
against a temp directory in tests or in-memory for previews.
"""

from __future__ import annotations

import os
from typing import Any

from fastapi import Depends, FastAPI, Query, Request
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..catalog import Catalog, KIND_BASIC, KIND_COMPOSITE, KIND_MULTILEVEL
from ..charts import ChartRegistry, list_chart_types
from ..errors import EngineError
from ..indicators import (
    BasicIndicatorSpec,
    CompositeIndicatorSpec,
    Engine,
    MultiLevelIndicatorSpec,
    validate_basic,
    validate_composite,
    validate_multilevel,
)
from ..ingest import ingest_batch
from ..irc import indicator_snippet, question_snippet
from ..methods import MappingSet, MethodRegistry, default_registry, list_methods, suggest_mappings
from ..model import Column, ColumnType, common_attributes
from ..specs import filters_from_doc, resolve_record, scope_from_doc, spec_from_doc
from ..store import EventStore, list_attribute_values, list_dimension_values, query_dataset
from .auth import ANONYMOUS, Identity, TokenAuth, optional_identity, require_identity
from .schemas import (
    AssociateModel,
    GoalRequestModel,
    GoalReviewModel,
    IndicatorCreateModel,
    IndicatorUpdateModel,
    PreviewRequest,
    QueryRequest,
    QuestionCreateModel,
    SuggestMappingsRequest,
)

_STATUS_BY_CODE = {
    "UnknownMethod": 404, "UnknownGoal": 404, "UnknownQuestion": 404,
    "UnknownIndicator": 404, "UnknownTarget": 404, "UnknownDimension": 404,
    "NotAssociated": 404,
    "NotAdmin": 403, "NotOwner": 403,
    "Duplicate": 409, "DuplicateGoal": 409, "DuplicateAssociation": 409,
    "RestrictDelete": 409,
    "StoreUnavailable": 503,
}

STATIC_DIR = os.path.join(os.path.dirname(__file__), "..", "static")


def create_app(
    data_dir: str | None = None,
    admin_token: str | None = None,
    app_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="LAVA indicator engine", version="0.1.0")

    store = EventStore(data_dir)
    catalog = Catalog(data_dir)
    methods = default_registry()
    charts = ChartRegistry()
    engine = Engine(store, methods, charts)

    app.state.store = store
    app.state.catalog = catalog
    app.state.methods = methods
    app.state.charts = charts
    app.state.engine = engine
    app.state.auth = TokenAuth(data_dir, admin_token or os.environ.get("LAVA_ADMIN_TOKEN"))

    @app.exception_handler(EngineError)
    async def engine_error_handler(_request: Request, error: EngineError):
        status = _STATUS_BY_CODE.get(error.code, 400)
        return JSONResponse(status_code=status, content={"error": error.to_doc()})

    # -- health / ingestion ---------------------------------------------------

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "events": len(store)}

    @app.post("/api/v1/events")
    def ingest_events(batch: list[Any], _identity: Identity = Depends(require_identity)):
        return ingest_batch(batch, store).to_doc()

    # -- dataset exploration ----------------------------------------------------

    def _split(values: list[str]) -> list[str]:
        out: list[str] = []
        for value in values:
            out.extend(v for v in value.split(",") if v)
        return out

    @app.get("/api/v1/dimensions/{name}")
    def dimension_values(name: str, _identity: Identity = Depends(require_identity)):
        return {"dimension": name, "values": list_dimension_values(store, name)}

    @app.get("/api/v1/attributes")
    def attributes(
        categories: list[str] = Query(default=[]),
        _identity: Identity = Depends(require_identity),
    ):
        columns = common_attributes(_split(categories), store.schemas)
        return {"attributes": [c.to_doc() for c in columns]}

    @app.get("/api/v1/attribute-values")
    def attribute_values(
        attribute: str,
        categories: list[str] = Query(default=[]),
        sources: list[str] = Query(default=[]),
        platforms: list[str] = Query(default=[]),
        actions: list[str] = Query(default=[]),
        prefix: str = "",
        _identity: Identity = Depends(require_identity),
    ):
        scope = scope_from_doc({
            "categories": _split(categories), "sources": _split(sources),
            "platforms": _split(platforms), "actions": _split(actions),
        })
        return {"attribute": attribute,
                "values": list_attribute_values(store, scope, attribute, prefix)}

    @app.post("/api/v1/query")
    def run_query(body: QueryRequest, identity: Identity = Depends(require_identity)):
        scope = scope_from_doc(body.scope.model_dump())
        filters = filters_from_doc(body.filters.model_dump())
        return query_dataset(store, scope, filters, identity.user_id).to_doc()

    # -- methods and charts --------------------------------------------------------

    @app.get("/api/v1/methods")
    def methods_index(_identity: Identity = Depends(require_identity)):
        return {"methods": [d.to_doc() for d in list_methods(methods)]}

    @app.get("/api/v1/methods/{method_id}")
    def method_detail(method_id: str, _identity: Identity = Depends(require_identity)):
        return methods.get(method_id).to_doc()

    @app.get("/api/v1/charts")
    def charts_index(_identity: Identity = Depends(require_identity)):
        return {"libraries": list_chart_types(charts)}

    @app.post("/api/v1/mappings/suggest")
    def mappings_suggest(body: SuggestMappingsRequest, _identity: Identity = Depends(require_identity)):
        descriptor = methods.get(body.method_id)
        schema = [Column(c.name, ColumnType(c.type)) for c in body.columns]
        return {"mappings": suggest_mappings(descriptor, schema).to_doc()}

    # -- execution -------------------------------------------------------------------

    def _execute(kind: str, spec, requester: str):
        if isinstance(spec, BasicIndicatorSpec):
            return engine.execute_basic(spec, requester)
        if isinstance(spec, CompositeIndicatorSpec):
            return engine.execute_composite(spec, requester)
        return engine.execute_multilevel(spec, requester)

    @app.post("/api/v1/preview")
    def preview(body: PreviewRequest, identity: Identity = Depends(require_identity)):
        spec = spec_from_doc(body.kind, body.spec, catalog)
        return _execute(body.kind, spec, identity.user_id).to_doc()

    @app.get("/api/v1/render/{indicator_id}")
    def render(indicator_id: str, identity: Identity = Depends(optional_identity)):
        record = catalog.find_indicator(indicator_id)
        if record is None:
            raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
        spec = resolve_record(record, catalog)
        result = _execute(record.kind, spec, identity.user_id)
        if result.chart is None:
            raise EngineError("VizMappingInvalid", "indicator has no chart configured")
        return result.chart

    # -- goals ---------------------------------------------------------------------

    @app.get("/api/v1/goals")
    def goals_index(status: str | None = None, _identity: Identity = Depends(require_identity)):
        return {"goals": [g.to_doc() for g in catalog.goals(status)]}

    @app.post("/api/v1/goals", status_code=201)
    def goal_request(body: GoalRequestModel, identity: Identity = Depends(require_identity)):
        return catalog.request_goal(body.name, body.description, identity.user_id).to_doc()

    @app.post("/api/v1/goals/{goal_id}/review")
    def goal_review(goal_id: str, body: GoalReviewModel, identity: Identity = Depends(require_identity)):
        goal = catalog.review_goal(goal_id, body.decision, identity.is_admin)
        return {"status": "rejected"} if goal is None else goal.to_doc()

    # -- questions --------------------------------------------------------------------

    @app.get("/api/v1/questions")
    def questions_index(_identity: Identity = Depends(require_identity)):
        return {"questions": [q.to_doc() for q in catalog.questions()]}

    @app.get("/api/v1/questions/{question_id}")
    def question_detail(question_id: str, _identity: Identity = Depends(require_identity)):
        question = catalog.find_question(question_id)
        if question is None:
            raise EngineError("UnknownQuestion", f"no question {question_id!r}")
        return question.to_doc()

    @app.post("/api/v1/questions", status_code=201)
    def question_create(body: QuestionCreateModel, identity: Identity = Depends(require_identity)):
        return catalog.save_question(body.goal_id, body.text, identity.user_id).to_doc()

    @app.delete("/api/v1/questions/{question_id}", status_code=204)
    def question_delete(question_id: str, identity: Identity = Depends(require_identity)):
        catalog.delete_question(question_id, identity.user_id, identity.is_admin)

    @app.post("/api/v1/questions/{question_id}/indicators")
    def question_associate(question_id: str, body: AssociateModel,
                           identity: Identity = Depends(require_identity)):
        return catalog.associate_indicator(
            question_id, body.indicator_id, identity.user_id, identity.is_admin
        ).to_doc()

    @app.delete("/api/v1/questions/{question_id}/indicators/{indicator_id}")
    def question_disassociate(question_id: str, indicator_id: str,
                              identity: Identity = Depends(require_identity)):
        return catalog.disassociate_indicator(
            question_id, indicator_id, identity.user_id, identity.is_admin
        ).to_doc()

    # -- indicators ----------------------------------------------------------------------

    def _validate_spec_doc(kind: str, spec_doc: dict) -> None:
        spec = spec_from_doc(kind, spec_doc, catalog)
        if spec.chart is None:
            raise EngineError("InvalidSpec", "a saved indicator needs a chart")
        validator = {
            KIND_BASIC: validate_basic,
            KIND_COMPOSITE: validate_composite,
            KIND_MULTILEVEL: validate_multilevel,
        }[kind]
        report = validator(spec, store, methods, charts)
        if report:
            raise EngineError("InvalidSpec", "indicator definition is invalid", issues=report)

    @app.get("/api/v1/indicators")
    def indicators_index(_identity: Identity = Depends(require_identity)):
        return {"indicators": [r.to_doc() for r in catalog.indicators()]}

    @app.get("/api/v1/indicators/{indicator_id}")
    def indicator_detail(indicator_id: str, _identity: Identity = Depends(require_identity)):
        record = catalog.find_indicator(indicator_id)
        if record is None:
            raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
        return record.to_doc()

    @app.post("/api/v1/indicators", status_code=201)
    def indicator_create(body: IndicatorCreateModel, identity: Identity = Depends(require_identity)):
        if body.kind not in (KIND_BASIC, KIND_COMPOSITE, KIND_MULTILEVEL):
            raise EngineError("InvalidSpec", f"unknown indicator kind {body.kind!r}")
        _validate_spec_doc(body.kind, body.spec)
        return catalog.save_indicator(body.kind, body.spec, identity.user_id).to_doc()

    @app.put("/api/v1/indicators/{indicator_id}")
    def indicator_update(indicator_id: str, body: IndicatorUpdateModel,
                         identity: Identity = Depends(require_identity)):
        record = catalog.find_indicator(indicator_id)
        if record is None:
            raise EngineError("UnknownIndicator", f"no indicator {indicator_id!r}")
        _validate_spec_doc(record.kind, body.spec)
        return catalog.update_indicator(
            indicator_id, body.spec, identity.user_id, identity.is_admin
        ).to_doc()

    @app.delete("/api/v1/indicators/{indicator_id}", status_code=204)
    def indicator_delete(indicator_id: str, identity: Identity = Depends(require_identity)):
        catalog.delete_indicator(indicator_id, identity.user_id, identity.is_admin)

    @app.post("/api/v1/indicators/{indicator_id}/copy", status_code=201)
    def indicator_copy(indicator_id: str, identity: Identity = Depends(require_identity)):
        return catalog.load_indicator_copy(indicator_id, identity.user_id).to_doc()

    # -- embedding ------------------------------------------------------------------------

    def _base_url(request: Request, override: str | None) -> str:
        return (override or str(request.base_url)).rstrip("/")

    @app.get("/api/v1/irc/question/{question_id}", response_class=HTMLResponse)
    def irc_question(question_id: str, request: Request, base_url: str | None = None):
        question = catalog.find_question(question_id)
        if question is None:
            raise EngineError("UnknownTarget", f"no question {question_id!r}")
        return question_snippet(question.indicator_ids, _base_url(request, base_url))

    @app.get("/api/v1/irc/{indicator_id}", response_class=HTMLResponse)
    def irc_indicator(indicator_id: str, request: Request, base_url: str | None = None):
        if not catalog.has_indicator(indicator_id):
            raise EngineError("UnknownTarget", f"no indicator {indicator_id!r}")
        return indicator_snippet(indicator_id, _base_url(request, base_url))

    @app.get("/embed.js", include_in_schema=False)
    def embed_script():
        return FileResponse(os.path.join(STATIC_DIR, "embed.js"), media_type="text/javascript")

    if app_dir and os.path.isdir(app_dir):
        app.mount("/app", StaticFiles(directory=app_dir, html=True), name="app")

    return app
