"""HTTP service: model CRUD, species lookup, live simulation sessions.

A thin shell over the core modules: every behavior here is attributable
to a core operation. Sessions own one engine state each; commands are
serialized under the session lock; a background thread steps the engine
while the session is running and appends frames to the session history.
The frame stream replays history from the start (so a reconnecting
client reproduces its chart) and then follows live frames, paced to at
most 20 frames per second of wall clock; the stepper waits when any
subscriber falls more than 256 frames behind (backpressure), and no
frames are emitted while the session is paused.
"""

from __future__ import annotations

import itertools
import json
import os
import threading
import time
from pathlib import Path
from typing import Iterator, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from .compiler import CompileError, build_domain_model, compile_for_engine, lower_to_ir
from .engine import (
    Command,
    IllegalTransition,
    SimConfig,
    Status,
    TimeSeries,
    control,
    init_run,
    series_names,
    step,
)
from .model import ModelError, canonical_json, parse_model, serialize_model, validate_model
from .traits import BackendUnavailable, EmptyQuery, UnknownTaxon, active_backend, derive_parameters

FRAME_INTERVAL = 0.05  # <= 20 frames/s on the live tail of a stream
STREAM_BUFFER = 256

_STATIC_ENV = "ECOFORGE_STATIC_DIR"


def _error(status: int, code: str, message: str, subject: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "subject": subject},
    )


class ModelStore:
    """In-memory store with optional directory persistence (ECOFORGE_DATA_DIR)."""

    def __init__(self, data_dir: Optional[str] = None):
        self._lock = threading.Lock()
        self._models: dict[str, bytes] = {}
        self._counter = itertools.count(1)
        self._dir = Path(data_dir) if data_dir else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.json")):
                self._models[path.stem] = path.read_bytes()

    def _persist(self, model_id: str, payload: Optional[bytes]) -> None:
        if not self._dir:
            return
        path = self._dir / f"{model_id}.json"
        if payload is None:
            path.unlink(missing_ok=True)
        else:
            path.write_bytes(payload)

    def create(self, payload: bytes, doc_id: str) -> str:
        with self._lock:
            model_id = doc_id or f"model-{next(self._counter)}"
            while model_id in self._models:
                model_id = f"model-{next(self._counter)}"
            self._models[model_id] = payload
            self._persist(model_id, payload)
            return model_id

    def get(self, model_id: str) -> Optional[bytes]:
        with self._lock:
            return self._models.get(model_id)

    def put(self, model_id: str, payload: bytes) -> bool:
        with self._lock:
            if model_id not in self._models:
                return False
            self._models[model_id] = payload
            self._persist(model_id, payload)
            return True

    def delete(self, model_id: str) -> bool:
        with self._lock:
            if model_id not in self._models:
                return False
            del self._models[model_id]
            self._persist(model_id, None)
            return True


class Session:
    """One live simulation; commands serialized, frames fanned out read-only."""

    def __init__(self, session_id: str, model_id: str, program, config: SimConfig, names):
        self.session_id = session_id
        self.model_id = model_id
        self.program = program
        self.config = config
        self.population_names, self.pool_names = names
        self.cond = threading.Condition()
        self.state = init_run(program, config)
        self.history = [self.state.frame()]
        self.subscribers: dict[int, int] = {}
        self._sub_ids = itertools.count(1)
        self.closed = False
        self._thread = threading.Thread(target=self._run_loop, daemon=True)
        self._thread.start()

    # -- stepping -----------------------------------------------------------

    def _backpressured(self) -> bool:
        if not self.subscribers:
            return False
        return len(self.history) - min(self.subscribers.values()) > STREAM_BUFFER

    def _run_loop(self) -> None:
        while True:
            with self.cond:
                while not self.closed and (
                    self.state.status is not Status.RUNNING or self._backpressured()
                ):
                    self.cond.wait(timeout=0.5)
                if self.closed:
                    return
                self._advance()

    def _advance(self) -> None:
        step(self.state)
        if self.state.tick % self.config.snapshot_every == 0:
            self.history.append(self.state.frame())
        self.cond.notify_all()

    # -- commands -----------------------------------------------------------

    def command(self, name: str) -> dict:
        with self.cond:
            if name == "step":
                if self.state.status not in (Status.READY, Status.PAUSED):
                    raise IllegalTransition("step", self.state.status)
                self._advance()
                if self.state.status is not Status.FINISHED:
                    self.state.status = Status.PAUSED
            elif name == "reset":
                self.state = control(self.state, Command.RESET)
                self.history = [self.state.frame()]
            elif name in ("start", "stop"):
                self.state = control(self.state, Command(name))
            else:
                raise KeyError(name)
            self.cond.notify_all()
            return {"status": self.state.status.value, "tick": self.state.tick}

    def close(self) -> None:
        with self.cond:
            self.closed = True
            self.cond.notify_all()

    # -- frames -------------------------------------------------------------

    def frame_dict(self, frame) -> dict:
        return {
            "tick": frame.tick,
            "populations": {
                name: {"count": frame.counts[i], "carbon": frame.carbons[i]}
                for i, name in enumerate(self.population_names)
            },
            "pools": {
                name: frame.amounts[j] for j, name in enumerate(self.pool_names)
            },
            "status": self.state.status.value,
        }

    def stream(self) -> Iterator[bytes]:
        with self.cond:
            sub_id = next(self._sub_ids)
            self.subscribers[sub_id] = 0
        replay_end = len(self.history)
        position = 0
        try:
            while True:
                with self.cond:
                    if position > len(self.history):
                        position = 0  # session was reset; replay again
                        replay_end = len(self.history)
                    while position >= len(self.history):
                        if self.state.status is Status.FINISHED or self.closed:
                            return
                        self.cond.wait(timeout=0.5)
                        if position > len(self.history):
                            position = 0
                            replay_end = len(self.history)
                    frame = self.history[position]
                    position += 1
                    self.subscribers[sub_id] = position
                    self.cond.notify_all()
                payload = json.dumps(self.frame_dict(frame), sort_keys=True)
                yield f"data: {payload}\n\n".encode("utf-8")
                if position > replay_end:
                    time.sleep(FRAME_INTERVAL)
        finally:
            with self.cond:
                self.subscribers.pop(sub_id, None)
                self.cond.notify_all()

    def timeseries(self) -> TimeSeries:
        with self.cond:
            return TimeSeries(
                frames=tuple(self.history),
                config=self.config,
                final_status=self.state.status,
                population_names=self.population_names,
                pool_names=self.pool_names,
            )


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="ecoforge service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = ModelStore(data_dir or os.environ.get("ECOFORGE_DATA_DIR"))
    sessions: dict[str, Session] = {}
    session_ids = itertools.count(1)
    sessions_lock = threading.Lock()
    app.state.store = store
    app.state.sessions = sessions

    def _load_model(model_id: str):
        payload = store.get(model_id)
        if payload is None:
            return None
        return parse_model(payload, check_refs=False)

    # -- models -----------------------------------------------------------

    @app.post("/api/v1/models", status_code=201)
    async def create_model(request: Request):
        body = await request.body()
        try:
            model = parse_model(body, check_refs=False)
        except ModelError as exc:
            return _error(400, "MODEL_SCHEMA", str(exc))
        model_id = store.create(serialize_model(model), model.id)
        return {"id": model_id}

    @app.get("/api/v1/models/{model_id}")
    def get_model(model_id: str):
        payload = store.get(model_id)
        if payload is None:
            return _error(404, "UNKNOWN_MODEL", f"no model {model_id!r}", model_id)
        return Response(content=payload, media_type="application/json")

    @app.put("/api/v1/models/{model_id}")
    async def put_model(model_id: str, request: Request):
        body = await request.body()
        if store.get(model_id) is None:
            return _error(404, "UNKNOWN_MODEL", f"no model {model_id!r}", model_id)
        try:
            model = parse_model(body, check_refs=False)
        except ModelError as exc:
            return _error(400, "MODEL_SCHEMA", str(exc))
        report = validate_model(model)
        if report.errors:
            return JSONResponse(status_code=422, content=report.as_dict())
        store.put(model_id, serialize_model(model))
        return {"id": model_id}

    @app.delete("/api/v1/models/{model_id}", status_code=204)
    def delete_model(model_id: str):
        if not store.delete(model_id):
            return _error(404, "UNKNOWN_MODEL", f"no model {model_id!r}", model_id)
        return Response(status_code=204)

    @app.post("/api/v1/models/{model_id}/validate")
    def validate_stored(model_id: str):
        model = _load_model(model_id)
        if model is None:
            return _error(404, "UNKNOWN_MODEL", f"no model {model_id!r}", model_id)
        return validate_model(model).as_dict()

    # -- species ------------------------------------------------------------

    @app.get("/api/v1/species")
    def search_species(q: str = ""):
        try:
            matches = active_backend().search_taxa(q)
        except EmptyQuery:
            return _error(400, "EMPTY_QUERY", "query must be non-empty")
        except BackendUnavailable as exc:
            return _error(503, "BACKEND_UNAVAILABLE", str(exc))
        return [m.as_dict() for m in matches]

    @app.get("/api/v1/species/{taxon_id}/parameters")
    def species_parameters(taxon_id: str):
        backend = active_backend()
        try:
            taxon = backend.get_taxon(taxon_id)
            records = backend.fetch_traits(taxon_id)
        except UnknownTaxon:
            return _error(404, "UNKNOWN_TAXON", f"no taxon {taxon_id!r}", taxon_id)
        except BackendUnavailable as exc:
            return _error(503, "BACKEND_UNAVAILABLE", str(exc))
        properties, report = derive_parameters(records, taxon.ancestry)
        return {"properties": properties.as_dict(), "report": report.as_dict()}

    # -- simulations ----------------------------------------------------------

    @app.post("/api/v1/simulations", status_code=201)
    async def create_simulation(request: Request):
        body = await request.json()
        model_id = body.get("model_id", "")
        model = _load_model(model_id)
        if model is None:
            return _error(404, "UNKNOWN_MODEL", f"no model {model_id!r}", model_id)
        report = validate_model(model)
        if report.errors:
            return JSONResponse(status_code=422, content=report.as_dict())
        meta = model.metadata
        config = SimConfig(
            seed=int(body.get("seed", 0)),
            max_ticks=int(body.get("max_ticks", 120)),
            grid_width=int(body.get("grid_width", meta.get("grid_width", 51))),
            grid_height=int(body.get("grid_height", meta.get("grid_height", 51))),
            snapshot_every=int(body.get("snapshot_every", 1)),
        )
        try:
            program = compile_for_engine(lower_to_ir(build_domain_model(model)))
        except CompileError as exc:
            return _error(422, "COMPILE_ERROR", str(exc), model_id)
        with sessions_lock:
            session_id = f"sim-{next(session_ids)}"
            sessions[session_id] = Session(
                session_id, model_id, program, config, series_names(program)
            )
        return {"session_id": session_id, "status": "ready", "tick": 0}

    def _session(session_id: str) -> Optional[Session]:
        with sessions_lock:
            return sessions.get(session_id)

    @app.post("/api/v1/simulations/{session_id}/command")
    async def simulation_command(session_id: str, request: Request):
        session = _session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}", session_id)
        body = await request.json()
        name = body.get("command", "")
        try:
            return session.command(name)
        except IllegalTransition as exc:
            return _error(409, "ILLEGAL_TRANSITION", str(exc), session_id)
        except KeyError:
            return _error(400, "UNKNOWN_COMMAND", f"unknown command {name!r}", session_id)

    @app.get("/api/v1/simulations/{session_id}")
    def simulation_status(session_id: str):
        session = _session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}", session_id)
        with session.cond:
            return {
                "session_id": session_id,
                "model_id": session.model_id,
                "status": session.state.status.value,
                "tick": session.state.tick,
                "frames": len(session.history),
            }

    @app.get("/api/v1/simulations/{session_id}/frames")
    def simulation_frames(session_id: str):
        session = _session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}", session_id)
        return StreamingResponse(session.stream(), media_type="text/event-stream")

    @app.get("/api/v1/simulations/{session_id}/series.csv")
    def simulation_series(session_id: str):
        session = _session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}", session_id)
        with session.cond:
            if session.state.status is not Status.FINISHED:
                return _error(409, "NOT_FINISHED", "simulation has not finished", session_id)
        return Response(content=session.timeseries().to_csv_bytes(), media_type="text/csv")

    @app.delete("/api/v1/simulations/{session_id}", status_code=204)
    def delete_simulation(session_id: str):
        with sessions_lock:
            session = sessions.pop(session_id, None)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}", session_id)
        session.close()
        return Response(status_code=204)

    static_dir = os.environ.get(_STATIC_ENV)
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
