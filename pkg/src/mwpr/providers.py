"""Expression providers: where a query's algebraic expression comes from.

The retrieval engine is agnostic to the source. ``provide_gold`` echoes a
record's annotated equation; ``provide_remote`` asks an external generator
service over a one-endpoint JSON protocol:

    POST <endpoint>  {"text": string, "numbers": [number]}
    200              {"equation": string}
    non-2xx          {"error": string}

Whatever comes back flows through the normal parsing pipeline, so a
garbage equation surfaces as a parse error downstream, never a crash here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import httpx

from .corpus import MWPRecord
from .errors import (
    BadResponseError,
    GeneratorConnectionError,
    GeneratorTimeoutError,
    MissingEquationError,
    RemoteGeneratorError,
)

DEFAULT_TIMEOUT_MS = 5000


@dataclass(frozen=True)
class ExpressionRequest:
    text: str
    text_numbers: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExpressionResponse:
    equation: str
    provider_name: str
    latency_ms: float


def provide_gold(record: MWPRecord) -> ExpressionResponse:
    """Echo the record's annotated equation."""
    start = time.perf_counter()
    if not record.equation:
        raise MissingEquationError(f"record {record.id!r} has no equation")
    return ExpressionResponse(equation=record.equation, provider_name="gold",
                              latency_ms=(time.perf_counter() - start) * 1e3)


def provide_remote(request: ExpressionRequest, endpoint: str,
                   timeout_ms: int = DEFAULT_TIMEOUT_MS) -> ExpressionResponse:
    """Fetch an expression from a remote generator service."""
    payload = {"text": request.text, "numbers": list(request.text_numbers)}
    start = time.perf_counter()
    try:
        response = httpx.post(endpoint, json=payload,
                              timeout=timeout_ms / 1000.0)
    except httpx.TimeoutException as err:
        raise GeneratorTimeoutError(
            f"generator at {endpoint} exceeded {timeout_ms} ms") from err
    except httpx.TransportError as err:
        raise GeneratorConnectionError(
            f"cannot reach generator at {endpoint}: {err}") from err
    latency_ms = (time.perf_counter() - start) * 1e3
    if response.status_code < 200 or response.status_code >= 300:
        raise RemoteGeneratorError(
            f"generator returned {response.status_code}: "
            f"{_error_message(response)}",
            status_code=response.status_code)
    try:
        body = response.json()
    except ValueError as err:
        raise BadResponseError(f"generator returned non-JSON: {err}") from err
    equation = body.get("equation") if isinstance(body, dict) else None
    if not isinstance(equation, str) or not equation:
        raise BadResponseError(
            "generator response is missing a non-empty 'equation' field")
    return ExpressionResponse(equation=equation, provider_name="remote",
                              latency_ms=latency_ms)


def _error_message(response: httpx.Response) -> str:
    try:
        body = response.json()
        if isinstance(body, dict) and isinstance(body.get("error"), str):
            return body["error"]
    except ValueError:
        pass
    return response.text[:200]
