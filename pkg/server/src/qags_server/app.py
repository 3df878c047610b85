"""FastAPI application exposing /v1/questions, /v1/answers, /v1/health.

Behaviour pinned by the wire protocol: every response (including errors)
carries the ``X-QAGS-Protocol: 1`` header; schema violations return 422 with
an ``{"error": ...}`` body; requests arriving before the engine finished
loading get 503. Question lists leave sorted by (log_prob desc, text asc) and
truncated to the requested beam width; answer spans are checked against the
context before they leave the process.
"""

import logging
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from .config import ServerConfig
from .engines import build_engine

PROTOCOL_HEADER = "X-QAGS-Protocol"
PROTOCOL_VERSION = "1"

logger = logging.getLogger(__name__)


class QuestionRequest(BaseModel):
    context: str
    answer: str
    beam_width: int = Field(ge=1)
    min_len: int = Field(default=8, ge=0)
    max_len: int = Field(default=60, ge=0)

    @model_validator(mode="after")
    def _lengths_ordered(self):
        if self.min_len > self.max_len:
            raise ValueError("min_len must be <= max_len")
        return self


class AnswerRequest(BaseModel):
    question: str = Field(min_length=1)
    context: str


def create_app(config: ServerConfig | None = None, engine=None) -> FastAPI:
    """Build the service; pass ``engine`` to skip the startup load (tests)."""
    config = config or ServerConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.engine is None:
            def load():
                app.state.engine = build_engine(config)
                logger.info("engine ready: %s / %s", config.qg_model, config.qa_model)

            thread = threading.Thread(target=load, daemon=True)
            thread.start()
            if config.engine == "rule":
                thread.join()
        yield

    app = FastAPI(title="qags-model-server", lifespan=lifespan)
    app.state.engine = engine
    app.state.config = config

    @app.middleware("http")
    async def protocol_header(request: Request, call_next):
        claimed = request.headers.get(PROTOCOL_HEADER)
        if claimed is not None and claimed != PROTOCOL_VERSION:
            response = JSONResponse(
                {"error": f"unsupported protocol version {claimed!r}"}, status_code=400
            )
        else:
            response = await call_next(request)
        response.headers[PROTOCOL_HEADER] = PROTOCOL_VERSION
        return response

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        location = ".".join(str(part) for part in first.get("loc", ()))
        return JSONResponse(
            {"error": f"invalid request: {location}: {first.get('msg', 'validation failed')}"},
            status_code=422,
        )

    @app.exception_handler(HTTPException)
    async def http_error(request: Request, exc: HTTPException):
        return JSONResponse({"error": str(exc.detail)}, status_code=exc.status_code)

    # Requests run in parallel up to the worker count; the engine itself
    # serializes device access as needed.
    gate = threading.BoundedSemaphore(max(1, config.workers))

    def engine_or_503():
        current = app.state.engine
        if current is None:
            raise HTTPException(status_code=503, detail="models are still loading")
        return current

    @app.get("/v1/health")
    def health():
        current = engine_or_503()
        return {"status": "ok", "qg_model": current.qg_model, "qa_model": current.qa_model}

    @app.post("/v1/questions")
    def questions(request: QuestionRequest):
        current = engine_or_503()
        try:
            with gate:
                beams = current.generate(
                    request.context,
                    request.answer,
                    request.beam_width,
                    request.min_len,
                    request.max_len,
                )
        except LookupError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        scored = sorted(beams, key=lambda pair: (-pair[1], pair[0]))[: request.beam_width]
        for text, log_prob in scored:
            if log_prob > 0:
                raise HTTPException(status_code=500, detail=f"engine produced log_prob {log_prob} > 0")
        return {"questions": [{"text": text, "log_prob": log_prob} for text, log_prob in scored]}

    @app.post("/v1/answers")
    def answers(request: AnswerRequest):
        current = engine_or_503()
        try:
            with gate:
                span = current.answer(request.question, request.context)
        except LookupError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if span.text is None:
            return {"answer": None, "confidence": span.confidence}
        if request.context[span.start : span.end] != span.text:
            raise HTTPException(
                status_code=500,
                detail=f"engine span [{span.start},{span.end}) does not match its text",
            )
        return {
            "answer": {"text": span.text, "start": span.start, "end": span.end},
            "confidence": span.confidence,
        }

    return app
