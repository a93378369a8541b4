"""Stateless HTTP reward service.

JSON-over-HTTP wrapper around the verifier, for solver-in-the-loop RL
training and synthesis filtering.  Malformed HTTP bodies are 400s; a
well-formed request whose program fails for any reason is a 200 reply
with reward 0 and a diagnostic code.

Configuration (environment variables):
  PORT          listen port (default 8080)
  BATCH_CAP     maximum items per /v1/verify_batch call (default 1024)
  TIMEOUT_MS    per-item solve budget in milliseconds (default 2000)
  REGISTRY_PATH optional operator table overriding the bundled default
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, model_validator

from .registry import default_registry, load_registry, set_default_registry
from .verify import verify_program, verify_response

DEFAULT_PORT = 8080
DEFAULT_BATCH_CAP = 1024
DEFAULT_TIMEOUT_MS = 2000.0


class VerifyRequest(BaseModel):
    id: Optional[str] = None
    response: Optional[str] = None
    program: Optional[str] = None
    params: Optional[str] = None
    truth: float

    @model_validator(mode="after")
    def _exactly_one_payload(self):
        has_response = self.response is not None
        has_program = self.program is not None
        if has_response == has_program:
            raise ValueError(
                "provide exactly one of 'response' or 'program' (with 'params')"
            )
        if has_program and self.params is None:
            raise ValueError("'program' payloads require 'params'")
        return self


class VerifyReply(BaseModel):
    id: Optional[str] = None
    reward: int
    value: Optional[float] = None
    diagnostic: str
    elapsed_ms: float


def _verify_one(item: VerifyRequest, timeout_ms: float) -> VerifyReply:
    start = time.perf_counter()
    if item.response is not None:
        verdict = verify_response(item.response, item.truth, timeout_ms=timeout_ms)
    else:
        verdict = verify_program(item.program, item.params, item.truth,
                                 timeout_ms=timeout_ms)
    return VerifyReply(
        id=item.id,
        reward=verdict.reward,
        value=verdict.value,
        diagnostic=verdict.diagnostic.value,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )


def create_app(
    batch_cap: Optional[int] = None,
    timeout_ms: Optional[float] = None,
    registry_path: Optional[str] = None,
) -> FastAPI:
    batch_cap = batch_cap if batch_cap is not None else int(
        os.environ.get("BATCH_CAP", DEFAULT_BATCH_CAP))
    timeout_ms = timeout_ms if timeout_ms is not None else float(
        os.environ.get("TIMEOUT_MS", DEFAULT_TIMEOUT_MS))
    registry_path = registry_path or os.environ.get("REGISTRY_PATH")
    if registry_path:
        set_default_registry(load_registry(registry_path))

    app = FastAPI(title="geoformal reward service", version="1.0")
    executor = ThreadPoolExecutor(max_workers=os.cpu_count() or 4)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        # strip non-serializable ctx objects from pydantic's error records
        detail = [
            {"loc": list(e.get("loc", ())), "msg": e.get("msg"),
             "type": e.get("type")}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "operators": default_registry().form_count}

    @app.post("/v1/verify", response_model=VerifyReply)
    def verify(item: VerifyRequest):
        return _verify_one(item, timeout_ms)

    @app.post("/v1/verify_batch", response_model=List[VerifyReply])
    def verify_batch(items: List[VerifyRequest]):
        if len(items) > batch_cap:
            return JSONResponse(
                status_code=413,
                content={"detail": f"batch of {len(items)} exceeds cap {batch_cap}"},
            )
        # replies stay in request order; each item is isolated by the
        # total-verdict contract of the verifier
        return list(executor.map(lambda it: _verify_one(it, timeout_ms), items))

    return app


def run(port: Optional[int] = None) -> None:
    import uvicorn

    port = port if port is not None else int(os.environ.get("PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)
