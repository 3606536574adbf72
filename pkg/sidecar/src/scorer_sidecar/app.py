"""HTTP surface of the scoring sidecar.

Endpoints:

    POST /score     {kind, pairs, model_id?}        -> {scores: [...]}
    POST /classify  {sentences}                     -> {results: [...]}
    POST /extract   {sentences, prompt_id?}         -> {results: [...]}
    GET  /healthz                                   -> {status, models}

Status codes are part of the contract: 400 for malformed requests, 422
only for oversize texts, 503 when the addressed model is not loaded, 502
when the upstream completion endpoint fails, 429 when it rate-limits, 401
when a configured shared token is missing or wrong. All endpoints are
idempotent and the service keeps no state between requests; scoring per
backend is serialized by that backend's lock.

Requests are validated by hand instead of through framework models so
that shape errors map to 400, reserving 422 for the size limit.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .backends import KINDS, build_registry
from .classifier import MountedClassifier
from .config import MAX_TEXT_CHARS, Settings, settings_from_env
from .extractor import UpstreamError, UpstreamExtractor, UpstreamRateLimited, parse_reply

AUTH_HEADER = "X-Auth-Token"


class RequestError(Exception):
    """Maps straight onto an HTTP error response."""

    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


def _error(status_code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": message})


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except ValueError as exc:
        raise RequestError(400, f"request body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise RequestError(400, "request body must be a JSON object")
    return body


def _string_list(body: dict, field: str) -> list[str]:
    values = body.get(field)
    if not isinstance(values, list) or not values:
        raise RequestError(400, f"'{field}' must be a non-empty list")
    for i, value in enumerate(values):
        if not isinstance(value, str):
            raise RequestError(400, f"'{field}'[{i}] must be a string")
    return values


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings if settings is not None else settings_from_env()
    app = FastAPI(title="scorer-sidecar", version=__version__)
    registry = build_registry(settings.similarity_model, settings.contradiction_model)

    extractor = None
    if settings.llm_endpoint:
        extractor = UpstreamExtractor(settings.llm_endpoint, api_key=settings.llm_api_key)
    classifier = None
    if settings.classifier_artifact:
        classifier = MountedClassifier.from_path(settings.classifier_artifact)

    @app.exception_handler(RequestError)
    async def _request_error(request: Request, exc: RequestError):
        return _error(exc.status_code, exc.message)

    def _check_token(request: Request) -> None:
        if settings.auth_token and request.headers.get(AUTH_HEADER) != settings.auth_token:
            raise RequestError(401, f"missing or wrong {AUTH_HEADER} header")

    @app.post("/score")
    async def score(request: Request):
        _check_token(request)
        body = await _json_body(request)
        kind = body.get("kind")
        if kind not in KINDS:
            raise RequestError(400, f"'kind' must be one of {', '.join(KINDS)}")
        pairs = body.get("pairs")
        if not isinstance(pairs, list) or not pairs:
            raise RequestError(400, "'pairs' must be a non-empty list")
        for i, pair in enumerate(pairs):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise RequestError(400, f"pairs[{i}] must be a [textA, textB] pair")
            if not all(isinstance(text, str) for text in pair):
                raise RequestError(400, f"pairs[{i}] texts must be strings")
            for text in pair:
                if len(text) > MAX_TEXT_CHARS:
                    raise RequestError(
                        422, f"pairs[{i}] text of {len(text)} chars exceeds the {MAX_TEXT_CHARS} limit"
                    )
        model_id = body.get("model_id", "default")
        if not isinstance(model_id, str):
            raise RequestError(400, "'model_id' must be a string")
        backend = registry[kind].get(model_id)
        if backend is None:
            raise RequestError(503, f"model {model_id!r} is not loaded for kind {kind!r}")
        with backend.lock:
            scores = backend.score_pairs(pairs)
        return {"scores": scores, "model_id": backend.model_id}

    @app.post("/classify")
    async def classify(request: Request):
        _check_token(request)
        body = await _json_body(request)
        sentences = _string_list(body, "sentences")
        if classifier is None:
            raise RequestError(503, "no classifier artifact is mounted")
        return {"results": classifier.classify(sentences), "model_id": classifier.model_id}

    @app.post("/extract")
    async def extract(request: Request):
        _check_token(request)
        body = await _json_body(request)
        sentences = _string_list(body, "sentences")
        prompt_id = body.get("prompt_id", "default")
        if not isinstance(prompt_id, str) or not prompt_id:
            raise RequestError(400, "'prompt_id' must be a non-empty string")
        if extractor is None or not settings.prompt_dir:
            raise RequestError(503, "extraction is not configured (endpoint and prompt dir required)")
        prompt_path = Path(settings.prompt_dir) / f"{prompt_id}.txt"
        if not prompt_path.exists():
            raise RequestError(400, f"unknown prompt_id {prompt_id!r}")
        prompt = prompt_path.read_text(encoding="utf-8")

        results = []
        for sentence in sentences:
            try:
                raw = extractor.complete(prompt, sentence)
            except UpstreamRateLimited as exc:
                raise RequestError(429, f"upstream rate limit: {exc}") from exc
            except UpstreamError as exc:
                raise RequestError(502, f"upstream completion failure: {exc}") from exc
            parsed = parse_reply(raw)
            if parsed is None:
                results.append({"decision": None, "rationale": None, "raw": raw})
            else:
                results.append(parsed)
        return {"results": results}

    @app.get("/healthz")
    async def healthz():
        models = [registry[kind]["default"].info() for kind in KINDS]
        if classifier is not None:
            models.append(classifier.info())
        if extractor is not None:
            models.append({"kind": "extractor", "endpoint": extractor.endpoint})
        return {"status": "ok", "device": settings.device, "models": models}

    return app


app = create_app()
