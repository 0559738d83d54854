"""HTTP surface over the session store.

Thin by design: handlers validate the envelope, call the store, and
serialize. Domain errors map onto one stable error body shape:

    {"error": {"code": "<machine code>", "message": "<human text>"}}

codes: not_found, invalid_input, infeasible_constraints,
pool_exhausted, internal.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import (
    BalancedNewsError,
    ConfigError,
    EventLogError,
    InfeasibleConstraintsError,
    PoolExhaustedError,
    SourceError,
    UnknownArticleError,
    UnknownSessionError,
)
from .feed import FeedPage
from .session import HistoryPoint, SessionState, SessionStore


class CreateSessionBody(BaseModel):
    seed: Optional[int] = None
    lower_liberal: Optional[float] = None
    upper_liberal: Optional[float] = None


class ClickBody(BaseModel):
    feed: Literal["unfiltered", "balanced"]
    article_id: str = Field(min_length=1)


class ConstraintsBody(BaseModel):
    lower_liberal: float
    upper_liberal: float


def _page_dict(page: FeedPage, type_names: tuple[str, ...]) -> dict:
    return {
        "iteration": page.iteration,
        "counts": {
            name: count for name, count in zip(type_names, page.allocation.counts)
        },
        "slots": [
            {
                "id": article.id,
                "title": article.title,
                "url": article.url,
                "source_domain": article.source_domain,
                "type": article.type.name,
                "rating": article.rating,
                "published_at": article.published_at.isoformat().replace(
                    "+00:00", "Z"
                ),
            }
            for article in page.slots
        ],
    }


def _point_dict(point: HistoryPoint) -> dict:
    return {
        "t": point.t,
        "pct_liberal_unfiltered": point.pct_liberal_unfiltered,
        "pct_liberal_balanced": point.pct_liberal_balanced,
        "lower_liberal": point.lower_liberal,
        "upper_liberal": point.upper_liberal,
    }


def _feeds_dict(state: SessionState) -> dict:
    names = state.config.type_names
    return {
        "unfiltered": _page_dict(state.unfiltered_page, names),
        "balanced": _page_dict(state.balanced_page, names),
    }


def _constraints_dict(state: SessionState) -> dict:
    return {
        "lower_liberal": state.lower_liberal(),
        "upper_liberal": state.upper_liberal(),
    }


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


_ERROR_MAP: tuple[tuple[type[Exception], int, str], ...] = (
    (UnknownSessionError, 404, "not_found"),
    (UnknownArticleError, 409, "invalid_input"),
    (PoolExhaustedError, 409, "pool_exhausted"),
    (InfeasibleConstraintsError, 422, "infeasible_constraints"),
    (ConfigError, 422, "invalid_input"),
    (SourceError, 502, "internal"),
    (EventLogError, 500, "internal"),
)


def create_app(store: SessionStore, static_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="balancednews", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return _error_response(422, "invalid_input", str(exc.errors()[:3]))

    @app.exception_handler(BalancedNewsError)
    async def domain_error(request: Request, exc: BalancedNewsError):
        for klass, status, code in _ERROR_MAP:
            if isinstance(exc, klass):
                return _error_response(status, code, str(exc))
        return _error_response(500, "internal", str(exc))

    @app.exception_handler(ValueError)
    async def bad_value(request: Request, exc: ValueError):
        return _error_response(422, "invalid_input", str(exc))

    @app.exception_handler(Exception)
    async def unexpected(request: Request, exc: Exception):
        return _error_response(500, "internal", f"{type(exc).__name__}: {exc}")

    @app.post("/sessions", status_code=201)
    def create_session_endpoint(body: CreateSessionBody):
        state = store.create(
            seed=body.seed,
            lower_liberal=body.lower_liberal,
            upper_liberal=body.upper_liberal,
        )
        return {
            "session_id": state.session_id,
            "iteration": state.t,
            "constraints": _constraints_dict(state),
            "feeds": _feeds_dict(state),
            "history": [_point_dict(p) for p in state.history],
        }

    @app.get("/sessions/{session_id}/feeds")
    def get_feeds(session_id: str):
        state = store.get(session_id)
        return {
            "session_id": state.session_id,
            "iteration": state.t,
            "constraints": _constraints_dict(state),
            "feeds": _feeds_dict(state),
        }

    @app.post("/sessions/{session_id}/clicks")
    def post_click(session_id: str, body: ClickBody):
        state = store.click(session_id, body.feed, body.article_id)
        return {
            "session_id": state.session_id,
            "iteration": state.t,
            "feeds": _feeds_dict(state),
            "history_point": _point_dict(state.history[-1]),
        }

    @app.put("/sessions/{session_id}/constraints")
    def put_constraints(session_id: str, body: ConstraintsBody):
        state = store.change_constraints(
            session_id, body.lower_liberal, body.upper_liberal
        )
        return {
            "session_id": state.session_id,
            "iteration": state.t,
            "constraints": _constraints_dict(state),
            "feeds": _feeds_dict(state),
            "history_point": _point_dict(state.history[-1]),
        }

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        state = store.get(session_id)
        return {
            "session_id": state.session_id,
            "iteration": state.t,
            "history": [_point_dict(p) for p in state.history],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/")
        def root():
            return {
                "service": "balancednews",
                "endpoints": [
                    "POST /sessions",
                    "GET /sessions/{id}/feeds",
                    "POST /sessions/{id}/clicks",
                    "PUT /sessions/{id}/constraints",
                    "GET /sessions/{id}/history",
                ],
            }

    return app
