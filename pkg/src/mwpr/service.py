"""HTTP API over the retrieval engine.

Endpoints:

* ``POST /api/query``          — rank structurally matching problems
* ``POST /api/problems``       — add one problem to the repository
* ``GET  /api/problems/{id}``  — fetch one problem
* ``GET  /api/stats``          — snapshot counters

Every error body is ``{"code", "message", "detail?"}`` with codes from
{PARSE_ERROR, NOT_FOUND, DUPLICATE_ID, BAD_REQUEST, PROVIDER_ERROR,
INTERNAL}. Responses carry an ``X-API-Version`` header. Index mutation is
serialized behind an atomic snapshot swap, so concurrent reads never see a
partially updated bucket.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .corpus import IndexedCorpus, extract_text_numbers, make_record
from .errors import DuplicateIdError, ExpressionError, MwprError, ProviderError
from .expr import postfix_text, tree_postfix
from .matching import signature
from .providers import ExpressionRequest, provide_remote
from .retrieval import CorpusStore, parse_query, query

API_VERSION = 1

ENV_PORT = "MWPR_PORT"
ENV_CORPUS = "MWPR_CORPUS"
ENV_INDEX = "MWPR_INDEX"
ENV_GENERATOR_URL = "MWPR_GENERATOR_URL"
ENV_GENERATOR_TIMEOUT_MS = "MWPR_GENERATOR_TIMEOUT_MS"
ENV_CORS_ORIGINS = "MWPR_CORS_ORIGINS"


@dataclass
class ServiceEnv:
    """Settings read from the MWPR_* environment variables."""

    port: int | None
    corpus_path: str | None
    index_path: str | None
    generator_url: str | None
    generator_timeout_ms: int | None
    cors_origins: tuple[str, ...]


def env_config() -> ServiceEnv:
    timeout = os.environ.get(ENV_GENERATOR_TIMEOUT_MS)
    port = os.environ.get(ENV_PORT)
    origins = os.environ.get(ENV_CORS_ORIGINS, "*")
    return ServiceEnv(
        port=int(port) if port else None,
        corpus_path=os.environ.get(ENV_CORPUS),
        index_path=os.environ.get(ENV_INDEX),
        generator_url=os.environ.get(ENV_GENERATOR_URL),
        generator_timeout_ms=int(timeout) if timeout else None,
        cors_origins=tuple(o.strip() for o in origins.split(",") if o.strip()),
    )


class _BadRequest(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class _NotFound(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class QueryBody(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    text: str | None = None
    equation: str | None = None
    k: int = Field(default=3, ge=1, le=100)
    provider: Literal["gold", "remote"] = "gold"
    exclude_id: str | None = Field(default=None, alias="excludeId")


class ProblemBody(BaseModel):
    id: str = Field(min_length=1)
    text: str = Field(min_length=1)
    equation: str = Field(min_length=1)
    source: str = "user"
    solution: float | None = None


def create_app(corpus: IndexedCorpus, generator_url: str | None = None,
               generator_timeout_ms: int = 5000,
               cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    app = FastAPI(title="mwpr", version=str(API_VERSION))
    store = CorpusStore(corpus)
    app.state.store = store

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def add_version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-API-Version"] = str(API_VERSION)
        return response

    @app.post("/api/query")
    def query_endpoint(body: QueryBody) -> JSONResponse:
        equation = body.equation
        if equation is None and body.text is None:
            raise _BadRequest("provide 'equation' and/or 'text'")
        if equation is None:
            if body.provider != "remote":
                raise _BadRequest(
                    "an equation is required unless provider is 'remote'")
            if not generator_url:
                raise _BadRequest("no remote generator endpoint is configured")
            numbers = extract_text_numbers(body.text)
            generated = provide_remote(
                ExpressionRequest(body.text, numbers), generator_url,
                timeout_ms=generator_timeout_ms)
            equation = generated.equation
        tree = parse_query(equation, body.text)
        snapshot = store.snapshot
        results = query(snapshot, tree, body.text, k=body.k,
                        exclude_id=body.exclude_id)
        return JSONResponse({
            "results": [{
                "problemId": res.problem_id,
                "rank": res.rank,
                "lexScore": res.lex_score,
                "signature": res.signature,
                "text": snapshot.records[res.problem_id].text,
            } for res in results],
            "signature": signature(tree),
            "parsedExpression": postfix_text(tree_postfix(tree)),
        })

    @app.post("/api/problems", status_code=201)
    def add_problem_endpoint(body: ProblemBody) -> JSONResponse:
        record = make_record(body.id, body.text, body.equation,
                             source=body.source, solution=body.solution)
        outcome = store.add(record)
        return JSONResponse(status_code=201, content={
            "id": record.id,
            "indexed": outcome.indexed,
            "error": outcome.error,
        })

    @app.get("/api/problems/{problem_id}")
    def get_problem(problem_id: str) -> JSONResponse:
        record = store.snapshot.records.get(problem_id)
        if record is None:
            raise _NotFound(f"no problem with id {problem_id!r}")
        return JSONResponse({
            "id": record.id,
            "text": record.text,
            "equation": record.equation,
            "textNumbers": list(record.text_numbers),
            "source": record.source,
            "solution": record.solution,
        })

    @app.get("/api/stats")
    def stats() -> JSONResponse:
        s = store.snapshot.stats()
        return JSONResponse({
            "total": s.total,
            "indexed": s.indexed,
            "failed": s.failed,
            "buckets": s.buckets,
            "largestBucket": s.largest_bucket,
        })

    @app.exception_handler(_BadRequest)
    async def bad_request_handler(request: Request, exc: _BadRequest):
        return _error_response(400, "BAD_REQUEST", str(exc))

    @app.exception_handler(_NotFound)
    async def not_found_handler(request: Request, exc: _NotFound):
        return _error_response(404, "NOT_FOUND", str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "BAD_REQUEST", "invalid request body",
                               detail=jsonable_encoder(exc.errors()))

    @app.exception_handler(MwprError)
    async def domain_error_handler(request: Request, exc: MwprError):
        if isinstance(exc, ExpressionError):
            return _error_response(400, "PARSE_ERROR", str(exc), detail={
                "stage": exc.stage, "recordId": exc.record_id})
        if isinstance(exc, DuplicateIdError):
            return _error_response(409, "DUPLICATE_ID", str(exc))
        if isinstance(exc, ProviderError):
            return _error_response(502, "PROVIDER_ERROR", str(exc))
        return _error_response(500, "INTERNAL", str(exc))

    return app


def _error_response(status: int, code: str, message: str,
                    detail: object | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    response = JSONResponse(status_code=status, content=body)
    response.headers["X-API-Version"] = str(API_VERSION)
    return response
