"""Session service exposing the engine to interactive clients.

POST   /sessions                -> create a session from a spec document
GET    /sessions/{id}/state     -> current snapshot
POST   /sessions/{id}/actions   -> apply one action, returns the new snapshot
POST   /sessions/{id}/plan      -> plan a script for a goal polyline
WS     /sessions/{id}/events    -> snapshot stream, one push per revision

Payload field names match the scenario schema. Actions on one session are
totally ordered through a per-session lock; sessions are isolated.
"""
from __future__ import annotations

import asyncio
import uuid

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from . import planner
from .engine import Engine, EngineError, Snapshot
from .kinematics import KinematicsError
from .scenario import ScenarioError, parse_action, parse_spec, serialize_action


class _Session:
    def __init__(self, engine: Engine):
        self.engine = engine
        self.revision = 0
        self.lock = asyncio.Lock()
        self.subscribers: list[asyncio.Queue] = []

    def snapshot_doc(self) -> dict:
        doc = self.engine.snapshot().to_record()
        doc.pop("kind")
        doc.pop("after_action")
        doc["revision"] = self.revision
        return doc

    def broadcast(self, doc: dict) -> None:
        for queue in list(self.subscribers):
            queue.put_nowait(doc)


def _error(status: int, message: str, path: str | None = None) -> JSONResponse:
    body = {"error": {"message": message}}
    if path is not None:
        body["error"]["path"] = path
    return JSONResponse(body, status_code=status)


def create_app() -> FastAPI:
    app = FastAPI(title="jambeam gateway")
    sessions: dict[str, _Session] = {}

    def get_session(session_id: str) -> _Session | None:
        return sessions.get(session_id)

    @app.get("/")
    async def health():
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions")
    async def create_session(body: dict):
        try:
            spec = parse_spec(body)
            session = _Session(Engine(spec))
        except (ScenarioError, EngineError) as exc:
            path = getattr(exc, "path", None)
            return _error(400, getattr(exc, "message", str(exc)), path)
        session_id = uuid.uuid4().hex
        sessions[session_id] = session
        return {"id": session_id, "snapshot": session.snapshot_doc()}

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, f"no session {session_id}")
        return session.snapshot_doc()

    @app.post("/sessions/{session_id}/actions")
    async def apply_action(session_id: str, body: dict):
        session = get_session(session_id)
        if session is None:
            return _error(404, f"no session {session_id}")
        async with session.lock:
            try:
                action = parse_action(body, session.engine.spec.num_pouches)
            except ScenarioError as exc:
                return _error(400, exc.message, exc.path)
            try:
                session.engine.apply(action)
            except EngineError as exc:
                return _error(400, str(exc))
            session.revision += 1
            doc = session.snapshot_doc()
            session.broadcast(doc)
        return doc

    @app.post("/sessions/{session_id}/plan")
    async def request_plan(session_id: str, body: dict):
        session = get_session(session_id)
        if session is None:
            return _error(404, f"no session {session_id}")
        polyline = body.get("polyline")
        if not isinstance(polyline, list) or len(polyline) < 2:
            return _error(400, "polyline must be a list of [x, y] points", "polyline")
        tolerance = body.get("tolerance_m", 0.02)
        unknown = sorted(set(body) - {"polyline", "tolerance_m"})
        if unknown:
            return _error(400, "unknown field", unknown[0])
        try:
            goal = planner.GoalShape(np.asarray(polyline, dtype=float), tolerance)
            result = planner.plan_for_goal(goal, session.engine.spec,
                                           current_everted_m=session.engine.growth.everted_m)
        except (planner.PlannerError, KinematicsError, ValueError) as exc:
            return _error(400, str(exc))
        return {
            "script": [serialize_action(a) for a in result.script],
            "predicted": [[float(x), float(y)] for x, y in result.predicted],
            "residual_m": result.plan.residual_m,
            "angles_rad": result.plan.angles,
        }

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        session = get_session(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)
        try:
            await websocket.send_json(session.snapshot_doc())
            while True:
                doc = await queue.get()
                await websocket.send_json(doc)
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.remove(queue)

    return app


app = create_app()
