"""HTTP session service over the exploration engine.

Thin FastAPI layer: request models validate shape, the core modules validate
meaning, and every error becomes a flat {code, message, field?} JSON body.
The corpus index is loaded once and shared read-only across sessions.
"""

from __future__ import annotations

import itertools
import os
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import EngineConfig, load_config
from .effects import (ArtworkComposition, ArtworkItem, ValidationError,
                      artwork_to_dict, classify_emission_shape,
                      effect_to_dict, validate_artwork)
from .kinematics import (EmissionShape, InputError, Stroke,
                         kinematics_from_graphical_input)
from .search import NotFoundError
from .semantics import SemanticInputError, describe, make_providers
from .session import SessionError, SessionManager, UnknownSessionError
from .simulate import simulate
from .transforms import Transformation


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str,
                 field: str | None = None):
        self.status = status
        self.body = {"code": code, "message": message}
        if field is not None:
            self.body["field"] = field


# --- request models ----------------------------------------------------------

class StrokeModel(BaseModel):
    points: list[list[float]] = Field(default_factory=list)
    spiral_rate: float = 0.0


class GraphicalModel(BaseModel):
    shape: dict
    strokes: list[StrokeModel] = Field(default_factory=list)
    duration: float


class CreateSessionModel(BaseModel):
    text: str | None = None
    graphical: GraphicalModel | None = None
    kinematics: dict | None = None
    w: float | None = None


class SelectModel(BaseModel):
    effect_id: str
    w: float | None = None


class ArtworkItemModel(BaseModel):
    effect_id: str
    placement: dict | None = None
    start_delay: float = 0.0
    playback_speed: float = 1.0


class ArtworkModel(BaseModel):
    name: str
    session_id: str | None = None
    items: list[ArtworkItemModel]


# --- app ---------------------------------------------------------------------

def create_app(index, providers=None, config: EngineConfig | None = None
               ) -> FastAPI:
    config = config or EngineConfig()
    providers = providers or make_providers(config)
    llm, embedder = providers
    sessions = SessionManager(index, providers, config)
    artworks: dict[str, dict] = {}
    artwork_counter = itertools.count(1)
    artwork_lock = threading.Lock()

    app = FastAPI(title="particle effect exploration service")

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body)

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        return JSONResponse(status_code=422, content={
            "code": "validation_error",
            "message": first.get("msg", "invalid request"),
            "field": field or None})

    def _intent_kinematics(payload: CreateSessionModel):
        from .kinematics import Kinematics

        if payload.kinematics is not None:
            return Kinematics.from_dict(payload.kinematics)
        if payload.graphical is None:
            return None
        g = payload.graphical
        shape = EmissionShape(s=g.shape["s"], r=float(g.shape["r"]),
                              h=float(g.shape.get("h", 0.0)))
        strokes = [Stroke(points=tuple(tuple(p) for p in s.points),
                          spiral_rate=s.spiral_rate) for s in g.strokes]
        return kinematics_from_graphical_input(shape, strokes, g.duration,
                                               config.n_steps)

    def _session_body(session) -> dict:
        body = session.to_dict()
        body["current_mode"] = session.current_round.mode
        return body

    @app.post("/sessions", status_code=201)
    def create_session(payload: CreateSessionModel):
        try:
            semantic = (describe(payload.text, llm, embedder)
                        if payload.text else None)
            kinematics = _intent_kinematics(payload)
            session = sessions.create_session(
                semantic, kinematics, payload.w, intent_text=payload.text)
        except (SessionError, SemanticInputError, InputError,
                KeyError, ValueError) as exc:
            raise ApiError(422, "invalid_intent", str(exc)) from exc
        return _session_body(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return _session_body(sessions.get(session_id))
        except UnknownSessionError as exc:
            raise ApiError(404, "not_found", "unknown session",
                           field="session_id") from exc

    @app.post("/sessions/{session_id}/select")
    def select(session_id: str, payload: SelectModel):
        try:
            session = sessions.select_and_advance(
                session_id, payload.effect_id, payload.w)
        except UnknownSessionError as exc:
            raise ApiError(404, "not_found", "unknown session",
                           field="session_id") from exc
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc),
                           field="effect_id") from exc
        except SessionError as exc:
            raise ApiError(422, "invalid_selection", str(exc),
                           field="effect_id") from exc
        return _session_body(session)

    def _entry(effect_id: str):
        entry = index.entries.get(effect_id)
        if entry is None:
            raise ApiError(404, "not_found", "unknown effect",
                           field="effect_id")
        return entry

    @app.get("/effects/{effect_id}/preview")
    def preview(effect_id: str, max: int = 64):
        entry = _entry(effect_id)
        if max < 0:
            raise ApiError(422, "validation_error", "max must be >= 0",
                           field="max")
        if max == 0:
            return {"effect_id": effect_id, "samples": []}
        count = min(max, config.particle_count)
        trajectories = simulate(entry.definition, count,
                                config.samples_per_lifetime)
        samples = [{"particle_id": s.particle_id,
                    "birth_time": s.birth_time,
                    "t": s.t,
                    "position": list(s.position),
                    "size": s.size}
                   for s in trajectories.samples()]
        return {"effect_id": effect_id,
                "duration": entry.definition.emitter.duration,
                "samples": samples}

    @app.get("/effects/{effect_id}/kinematics")
    def kinematics(effect_id: str):
        entry = _entry(effect_id)
        return {"effect_id": effect_id,
                "definition": effect_to_dict(entry.definition),
                "shape_class": classify_emission_shape(entry.definition),
                "normalized_text":
                    entry.representation.semantic.normalized_text,
                "kinematics": entry.representation.kinematics.to_dict()}

    def _resolve_placement(item: ArtworkItemModel,
                           session_id: str | None) -> Transformation:
        if item.placement is not None:
            return Transformation.from_dict(item.placement)
        if session_id is not None:
            try:
                session = sessions.get(session_id)
            except UnknownSessionError as exc:
                raise ApiError(404, "not_found", "unknown session",
                               field="session_id") from exc
            # default to the aligned transformation from the retrieval round
            for round_ in reversed(session.rounds):
                for result in round_.results:
                    if result.effect_id == item.effect_id:
                        return result.best_transformation
        return Transformation()

    @app.post("/artworks", status_code=201)
    def compose(payload: ArtworkModel):
        items = tuple(
            ArtworkItem(effect_id=i.effect_id,
                        placement=_resolve_placement(i, payload.session_id),
                        start_delay=i.start_delay,
                        playback_speed=i.playback_speed)
            for i in payload.items)
        artwork = ArtworkComposition(name=payload.name, items=items)
        try:
            violations = validate_artwork(artwork, set(index.ids))
        except ValidationError as exc:
            violations = exc.violations
        if violations:
            v = violations[0]
            raise ApiError(422, "invalid_artwork", v.message, field=v.field)
        export = {"artwork": artwork_to_dict(artwork),
                  "effects": {i.effect_id:
                              effect_to_dict(index.entries[i.effect_id]
                                             .definition)
                              for i in items}}
        with artwork_lock:
            artwork_id = f"artwork-{next(artwork_counter):06d}"
            artworks[artwork_id] = export
        return {"artwork_id": artwork_id, "export": export}

    @app.get("/artworks/{artwork_id}/export")
    def export_artwork(artwork_id: str):
        export = artworks.get(artwork_id)
        if export is None:
            raise ApiError(404, "not_found", "unknown artwork",
                           field="artwork_id")
        return export

    app.state.sessions = sessions
    app.state.index = index
    return app


def app_from_env() -> FastAPI:
    """Build an app from FXSCOUT_INDEX (+ optional FXSCOUT_CONFIG)."""
    from .corpus import load_index

    path = os.environ.get("FXSCOUT_INDEX")
    if not path:
        raise RuntimeError("set FXSCOUT_INDEX to a built index file")
    config = load_config()
    return create_app(load_index(path), make_providers(config), config)
