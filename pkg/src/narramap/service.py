"""HTTP service exposing session-based exploration.

Thin FastAPI layer over :class:`narramap.session.WorkSession`: sessions
are in-memory, identified by opaque tokens, and never observe each
other's layers.  Within a session, mutating calls (retrieve, enrich,
closure, style) serialize on a per-session lock while reads interleave
freely.

Configuration comes from a JSON file plus environment overrides
(NARRAMAP_CONFIG, NARRAMAP_ENDPOINT_URL, NARRAMAP_MODE,
NARRAMAP_FIXTURE_DIR, NARRAMAP_LISTEN).
"""

from __future__ import annotations

import json
import logging
import os
import secrets
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .client import ClientError, EndpointConfig
from .portrayal import RuleValidationError, load_rulebase
from .queries import QueryValidationError, profile_by_name
from .session import SessionError, WorkSession, bundled_fixture_dir
from .temporal import Instant, MalformedTime, parse_time

logger = logging.getLogger(__name__)


class ProfileConfig(BaseModel):
    endpoint: str
    profile: str = "wikidata"
    mode: str = "live"
    fixture_dir: str | None = None
    page_size: int = 1000
    language: str = "en"


class ServiceConfig(BaseModel):
    listen: str = "127.0.0.1:8000"
    profiles: dict[str, ProfileConfig] = {}


def default_config() -> ServiceConfig:
    bundled = {
        "ww2-replay": ProfileConfig(
            endpoint="https://query.wikidata.org/sparql",
            profile="wikidata",
            mode="replay",
            fixture_dir="bundled:ww2",
        ),
        "magellan-replay": ProfileConfig(
            endpoint="https://query.wikidata.org/sparql",
            profile="wikidata",
            mode="replay",
            fixture_dir="bundled:magellan",
        ),
        "wikidata-live": ProfileConfig(
            endpoint="https://query.wikidata.org/sparql",
            profile="wikidata",
            mode="live",
        ),
    }
    return ServiceConfig(profiles=bundled)


def load_service_config(path: str | Path | None = None) -> ServiceConfig:
    config = default_config()
    path = path or os.environ.get("NARRAMAP_CONFIG")
    if path and Path(path).exists():
        data = json.loads(Path(path).read_text("utf-8"))
        file_config = ServiceConfig(
            listen=data.get("listen", config.listen),
            profiles={
                name: ProfileConfig(**profile) for name, profile in data.get("profiles", {}).items()
            },
        )
        merged = dict(config.profiles)
        merged.update(file_config.profiles)
        config = ServiceConfig(listen=file_config.listen, profiles=merged)
    endpoint_url = os.environ.get("NARRAMAP_ENDPOINT_URL")
    if endpoint_url:
        config.profiles["env"] = ProfileConfig(
            endpoint=endpoint_url,
            profile=os.environ.get("NARRAMAP_PROFILE", "wikidata"),
            mode=os.environ.get("NARRAMAP_MODE", "live"),
            fixture_dir=os.environ.get("NARRAMAP_FIXTURE_DIR"),
        )
    listen = os.environ.get("NARRAMAP_LISTEN")
    if listen:
        config.listen = listen
    return config


def _resolve_fixture_dir(value: str | None) -> Path | None:
    if value is None:
        return None
    if value.startswith("bundled:"):
        return bundled_fixture_dir(value.split(":", 1)[1])
    return Path(value)


def _session_for(profile_config: ProfileConfig) -> WorkSession:
    endpoint = EndpointConfig(
        base_url=profile_config.endpoint,
        mode=profile_config.mode,
        fixture_dir=_resolve_fixture_dir(profile_config.fixture_dir),
        page_size=profile_config.page_size,
        default_language=profile_config.language,
    )
    return WorkSession(endpoint, profile_by_name(profile_config.profile))


class CreateSessionBody(BaseModel):
    profile: str


class StartNodesBody(BaseModel):
    nodes: list[str]


class HopBody(BaseModel):
    direction: str
    property: str


class EnrichBody(BaseModel):
    layer: str
    properties: list[str]


class ClosureBody(BaseModel):
    root: str
    down: str
    up: str | None = None
    max_depth: int | None = None


class StyleBody(BaseModel):
    rulebase: dict | None = None


def _parse_window(frm: str | None, to: str | None):
    def instant(text: str | None) -> Instant | None:
        if not text:
            return None
        try:
            return parse_time(text)
        except MalformedTime as exc:
            raise HTTPException(400, f"bad time bound {text!r}: {exc}") from exc

    start, end = instant(frm), instant(to)
    if start is None and end is None:
        return None
    return (start, end)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or load_service_config()
    app = FastAPI(title="narramap", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, WorkSession] = {}

    def get_session(session_id: str) -> WorkSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return session

    def run(callable_, *args, **kwargs):
        try:
            return callable_(*args, **kwargs)
        except SessionError as exc:
            raise HTTPException(exc.status, str(exc)) from exc
        except (QueryValidationError, MalformedTime) as exc:
            raise HTTPException(400, str(exc)) from exc
        except RuleValidationError as exc:
            raise HTTPException(422, str(exc)) from exc
        except ClientError as exc:
            raise HTTPException(502, str(exc)) from exc

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(sessions)}

    @app.get("/profiles")
    def profiles():
        return {
            "profiles": [
                {"name": name, "mode": p.mode, "endpoint": p.endpoint}
                for name, p in sorted(config.profiles.items())
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        profile_config = config.profiles.get(body.profile)
        if profile_config is None:
            raise HTTPException(404, f"unknown profile {body.profile!r}")
        session_id = secrets.token_hex(8)
        sessions[session_id] = run(_session_for, profile_config)
        return {"session": session_id, "profile": body.profile}

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        session = get_session(session_id)
        return {
            "session": session_id,
            "start_nodes": session.start_nodes,
            "hops": [{"direction": h.direction, "property": h.property} for h in session.hops],
            "layers": [
                {
                    "iri": s.iri,
                    "label": s.label,
                    "kind": s.kind,
                    "feature_count": s.feature_count,
                }
                for s in session.layers.values()
            ],
            "styled": session.rulebase is not None,
        }

    @app.get("/sessions/{session_id}/search")
    def search(session_id: str, q: str = Query(default="")):
        session = get_session(session_id)
        if not q.strip():
            raise HTTPException(400, "empty search text")
        candidates = run(session.search_entities, q)
        return {
            "candidates": [
                {"iri": c.iri, "label": c.label, "description": c.description}
                for c in candidates
            ]
        }

    @app.get("/sessions/{session_id}/properties")
    def properties(
        session_id: str,
        direction: str = "forward",
        nodes: str | None = None,
        mode: str = "path",
        layer: str | None = None,
    ):
        session = get_session(session_id)
        if mode == "enrichment":
            if not layer:
                raise HTTPException(400, "enrichment discovery needs a layer")
            rows = run(session.discover_enrichment_properties, layer)
        else:
            node_list = [n for n in (nodes.split(",") if nodes else []) if n]
            rows = run(session.discover_properties, node_list or None, direction)
        return {"properties": rows}

    @app.post("/sessions/{session_id}/path/start")
    def set_start(session_id: str, body: StartNodesBody):
        session = get_session(session_id)
        with session.lock:
            run(session.set_start_nodes, body.nodes)
        return {"start_nodes": session.start_nodes}

    @app.post("/sessions/{session_id}/path/hops")
    def add_hop(session_id: str, body: HopBody):
        session = get_session(session_id)
        with session.lock:
            degree = run(session.add_hop, body.direction, body.property)
        return {"degree": degree}

    @app.delete("/sessions/{session_id}/path")
    def reset_path(session_id: str):
        session = get_session(session_id)
        with session.lock:
            session.reset_path()
        return {"degree": 0}

    @app.post("/sessions/{session_id}/retrieve")
    def retrieve(session_id: str):
        session = get_session(session_id)
        with session.lock:
            state = run(session.retrieve)
        return {"layer": state.iri, "label": state.label, "feature_count": state.feature_count}

    @app.post("/sessions/{session_id}/enrich")
    def enrich(session_id: str, body: EnrichBody):
        session = get_session(session_id)
        with session.lock:
            return run(session.enrich, body.layer, body.properties)

    @app.post("/sessions/{session_id}/closure")
    def closure(session_id: str, body: ClosureBody):
        session = get_session(session_id)
        with session.lock:
            state = run(session.closure, body.root, body.down, body.up, body.max_depth)
        return {"layer": state.iri, "label": state.label, "feature_count": state.feature_count}

    @app.post("/sessions/{session_id}/style")
    def style(session_id: str, body: StyleBody):
        session = get_session(session_id)
        rulebase = None
        if body.rulebase is not None:
            try:
                rulebase = load_rulebase(body.rulebase)
            except RuleValidationError as exc:
                raise HTTPException(422, str(exc)) from exc
        with session.lock:
            return run(session.apply_style, rulebase)

    @app.get("/sessions/{session_id}/map")
    def map_document(
        session_id: str,
        frm: str | None = Query(default=None, alias="from"),
        to: str | None = None,
    ):
        session = get_session(session_id)
        return run(session.map_document, _parse_window(frm, to))

    @app.get("/sessions/{session_id}/explain")
    def explain(session_id: str, item: str):
        session = get_session(session_id)
        return {"item": item, "traces": run(session.explain_item, item)}

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "turtle"):
        session = get_session(session_id)
        payload, content_type = run(session.export, format)
        return Response(content=payload, media_type=content_type)

    return app


def main() -> None:  # pragma: no cover - manual entry point
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    config = load_service_config()
    host, _, port = config.listen.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or "8000"))


if __name__ == "__main__":  # pragma: no cover
    main()
