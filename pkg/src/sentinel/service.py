"""HTTP classification service.

The model loads once at startup and is never mutated afterwards, so
concurrent requests share it safely. Blacklist providers are never
consulted here: the service classifies from features alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .features import bundled_lexicons, extract_all
from .ingest import load_corpus, parse_graph_post
from .ml.models import MODEL_VERSION, TrainedModel, classify, load_model
from .model import Post
from .urls import extract_urls

DEFAULT_ADDR = "127.0.0.1:8799"
PROVIDER_MODES = ("none", "offline")


class ServiceError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    model_path: str
    listen_addr: str = DEFAULT_ADDR
    store_path: Optional[str] = None
    cors_origin: Optional[str] = None
    provider_mode: str = "none"
    max_body_bytes: int = 64 * 1024
    request_timeout_ms: int = 2000
    include_score: bool = True

    def __post_init__(self) -> None:
        if self.provider_mode not in PROVIDER_MODES:
            raise ServiceError(f"provider_mode must be one of {PROVIDER_MODES}")
        if self.max_body_bytes < 1 or self.request_timeout_ms < 1:
            raise ServiceError("size and timeout limits must be positive")
        if ":" not in self.listen_addr:
            raise ServiceError("listen_addr must be host:port")

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])

    @classmethod
    def from_env(cls, env: Optional[dict] = None, **overrides) -> "ServiceConfig":
        env = os.environ if env is None else env
        settings: dict = {}
        if env.get("SENTINEL_ADDR"):
            settings["listen_addr"] = env["SENTINEL_ADDR"]
        if env.get("SENTINEL_MODEL"):
            settings["model_path"] = env["SENTINEL_MODEL"]
        if env.get("SENTINEL_STORE"):
            settings["store_path"] = env["SENTINEL_STORE"]
        if env.get("SENTINEL_CORS_ORIGIN"):
            settings["cors_origin"] = env["SENTINEL_CORS_ORIGIN"]
        settings.update(overrides)
        if "model_path" not in settings:
            raise ServiceError("model path required (SENTINEL_MODEL or --model)")
        return cls(**settings)


def _load_store(path: Optional[str]) -> Optional[dict[str, Post]]:
    if path is None:
        return None
    corpus = load_corpus(path, format="canonical_json_lines")
    return {post.post_id: post for post in corpus.posts}


def build_app(config: ServiceConfig) -> FastAPI:
    """Builds the app or raises: a service whose model cannot load must
    refuse to start rather than bind and fail per-request."""
    model: TrainedModel = load_model(config.model_path)
    if model.vocabularies is None:
        raise ServiceError(f"{config.model_path}: model carries no encoder vocabularies")
    store = _load_store(config.store_path)
    lexicons = bundled_lexicons()

    app = FastAPI(title="zero-hour post classifier", docs_url=None, redoc_url=None)
    if config.cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def classify_payload(post: Post) -> dict:
        extracted = extract_urls(post)
        vector = extract_all(post, extracted, model.vocabularies, lexicons)
        label, score = classify(model, vector)
        payload = {"id": post.post_id, "label": label}
        if config.include_score:
            payload["score"] = score
        return payload

    @app.get("/classify")
    async def classify_by_id(fid: Optional[str] = None):
        if fid is None or fid == "":
            return JSONResponse({"error": "missing fid parameter"}, status_code=400)
        if store is None:
            return JSONResponse({"error": "no post store configured"}, status_code=501)
        post = store.get(fid)
        if post is None:
            return JSONResponse({"error": "unknown post id"}, status_code=404)
        return classify_payload(post)

    @app.post("/classify")
    async def classify_body(request: Request):
        body = await request.body()
        if len(body) > config.max_body_bytes:
            return JSONResponse(
                {"error": f"body exceeds {config.max_body_bytes} bytes"}, status_code=413
            )
        try:
            raw = json.loads(body)
        except json.JSONDecodeError as exc:
            return JSONResponse(
                {"error": f"invalid JSON at offset {exc.pos}: {exc.msg}"}, status_code=400
            )
        try:
            post = parse_graph_post(raw)
        except ValueError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return classify_payload(post)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "model_version": MODEL_VERSION}

    return app


def run_service(config: ServiceConfig) -> None:
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
