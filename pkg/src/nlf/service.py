"""HTTP service exposing the comparison and pattern aggregations.

Every response is a pure function of (store, query): the store is
immutable after load, aggregation is recomputed per request from the
pre-indexed arrays, and repeated identical queries return byte-identical
bodies. Jitter for the comparison dots is a client concern, so the server
never randomizes anything.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .store import (
    InvalidFilter,
    QueryFilter,
    ScoreStore,
    UnknownPenetration,
    comparison_groups,
    patterns_grids,
    resolve_model,
)
from .timeseries import PenetrationLevel, Resolution

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>net-load forecast comparison</title></head>
<body><h1>net-load forecast comparison service</h1>
<p>No UI bundle is mounted. The JSON API lives under <code>/api</code>:
<a href="/api/meta">/api/meta</a>, /api/comparison, /api/patterns.</p>
</body></html>
"""


def _parse_penetration(raw: str | None) -> PenetrationLevel | None:
    """None means comparison mode across all levels."""
    if raw is None:
        raise InvalidFilter("penetration is required (20, 30, 50, or all)")
    if raw == "all":
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidFilter(f"penetration must be an integer or 'all', got {raw!r}") from exc
    try:
        return PenetrationLevel(value)
    except ValueError as exc:
        raise UnknownPenetration(f"penetration {value} is not one of 20, 30, 50") from exc


def _parse_resolution(raw: str | None) -> Resolution | None:
    if raw is None:
        return None
    try:
        return Resolution.from_label(raw)
    except ValueError as exc:
        raise InvalidFilter(f"resolution must be '15min' or '1h', got {raw!r}") from exc


def _parse_date(raw: str | None, name: str) -> date | None:
    if raw is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise InvalidFilter(f"{name} must be YYYY-MM-DD, got {raw!r}") from exc


def _parse_months(raw: str | None) -> tuple[int, ...] | None:
    if raw is None:
        return None
    try:
        months = tuple(int(part) for part in raw.split(","))
    except ValueError as exc:
        raise InvalidFilter(f"months must be comma-separated integers, got {raw!r}") from exc
    return months


def _build_filter(store: ScoreStore, request: Request) -> QueryFilter:
    def param(name: str) -> str | None:
        value = request.query_params.get(name)
        return value if value else None  # empty form fields mean "absent"

    return QueryFilter(
        model_id=resolve_model(store, param("model")),
        penetration=_parse_penetration(param("penetration")),
        resolution=_parse_resolution(param("resolution")),
        start_date=_parse_date(param("start"), "start"),
        end_date=_parse_date(param("end"), "end"),
        months=_parse_months(param("months")),
    )


def _query_echo(query: QueryFilter) -> dict:
    return {
        "model": query.model_id,
        "penetration": "all" if query.penetration is None else query.penetration.percent,
        "resolution": None if query.resolution is None else query.resolution.label,
        "start": None if query.start_date is None else query.start_date.isoformat(),
        "end": None if query.end_date is None else query.end_date.isoformat(),
        "months": None if query.months is None else sorted(set(query.months)),
    }


def create_app(store: ScoreStore | None, ui_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="net-load forecast comparison", docs_url=None, redoc_url=None)

    @app.exception_handler(InvalidFilter)
    async def _invalid_filter(request: Request, exc: InvalidFilter) -> JSONResponse:
        return JSONResponse({"error": "invalid_filter", "detail": str(exc)}, status_code=400)

    @app.exception_handler(UnknownPenetration)
    async def _unknown_penetration(request: Request, exc: UnknownPenetration) -> JSONResponse:
        return JSONResponse({"error": "unknown_penetration", "detail": str(exc)}, status_code=404)

    def require_store() -> ScoreStore:
        if store is None:
            raise RuntimeError("store not loaded")
        return store

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.get("/api/meta")
    async def meta() -> JSONResponse:
        if store is None:
            return JSONResponse({"error": "store_not_loaded"}, status_code=503)
        span = store.date_span
        return JSONResponse({
            "models": store.models,
            "reference_model": store.reference_model,
            "penetrations": [p.percent for p in store.penetrations],
            "resolutions": [r.label for r in store.resolutions],
            "date_span": None if span is None else {
                "start": span[0].isoformat(),
                "end": span[1].isoformat(),
            },
            "record_counts": {
                "total": sum(store.record_counts.values()),
                "by_scenario": dict(sorted(store.record_counts.items())),
            },
            "tool_version": store.manifest.get("tool_version"),
        })

    @app.get("/api/comparison")
    async def comparison(request: Request) -> JSONResponse:
        if store is None:
            return JSONResponse({"error": "store_not_loaded"}, status_code=503)
        query = _build_filter(require_store(), request)
        if query.months is not None:
            raise InvalidFilter("months filter applies to /api/patterns only")
        groups = comparison_groups(store, query)
        return JSONResponse({
            "mode": "all" if query.penetration is None else "single",
            "query": _query_echo(query),
            "groups": groups,
        })

    @app.get("/api/patterns")
    async def patterns(request: Request) -> JSONResponse:
        if store is None:
            return JSONResponse({"error": "store_not_loaded"}, status_code=503)
        query = _build_filter(require_store(), request)
        result = patterns_grids(store, query)
        return JSONResponse({
            "mode": "all" if query.penetration is None else "single",
            "query": _query_echo(query),
            "min_mean_crpss": result["min_mean_crpss"],
            "max_mean_crpss": result["max_mean_crpss"],
            "grids": result["grids"],
        })

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        async def index() -> str:
            return _PLACEHOLDER_PAGE

    return app
