"""HTTP service exposing the path engine for interactive group picking.

One session wraps one PathEngine.  The operator sees the scored candidate
list with A_lambda flags, picks a group (or lets the greedy policy step),
and the backward sweep runs automatically after every pick.  Group ids are
one-based on the wire the way paths are written down, zero-based internally.

Mutations on a session are strictly serialized: a second mutation arriving
while one is in flight gets 409 busy.  Readers always see the last
consistent snapshot.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .criterion import make_dataset, make_objective
from .engine import IgaConfig, PathEngine, path_to_dict
from .errors import GroupselError, PolicyError
from .fileio import load_design, load_groups
from .groups import GroupPartition, partition_from_dict

_CONFIG_KEYS = ("lam", "scoring_mode", "k_max", "delta_floor", "tie_tolerance", "backward")


class Session:
    """A path engine plus the bookkeeping the HTTP layer needs."""

    def __init__(self, sid: str, engine: PathEngine, family: str):
        self.id = sid
        self.engine = engine
        self.family = family
        self.created = time.time()
        self.updated = self.created
        self.mutex = threading.Lock()
        self.frozen: dict | None = None  # set by finish; idempotent afterwards
        self.state: dict = {}
        self.refresh_state()

    def refresh_state(self) -> None:
        eng = self.engine
        cfg = eng.cfg
        state: dict[str, Any] = {
            "id": self.id,
            "phase": "finished" if eng.finished else "awaiting_pick",
            "iteration": eng.iteration,
            "active_groups": [g + 1 for g in sorted(eng.active)],
            "Q": eng.Q,
            "Q_initial": eng.Q_initial,
            "events": [
                {
                    "action": e.action,
                    "group": e.group + 1,
                    "Q_after": e.Q_after,
                    "level_gain": e.level_gain,
                    "iteration": e.iteration,
                }
                for e in eng.events
            ],
            "config": {
                "lambda": cfg.lam,
                "scoring_mode": cfg.scoring_mode,
                "k_max": eng.k_max,
                "delta_floor": eng.delta_floor,
                "tie_tolerance": cfg.tie_tolerance,
                "backward": cfg.backward,
            },
            "family": self.family,
            "created": self.created,
            "updated": self.updated,
        }
        if eng.finished:
            state["finish_reason"] = eng.finish_reason
        else:
            state["candidates"] = [
                {"group": c.group + 1, "score": c.score, "in_A_lambda": c.in_A_lambda}
                for c in eng.candidates
            ]
        self.state = state

    def view(self) -> dict:
        """Last consistent snapshot; phase shows running while a mutation is live."""
        state = dict(self.state)
        if self.mutex.locked() and state["phase"] != "finished":
            state["phase"] = "running"
            state.pop("candidates", None)
        return state


def _parse_config(raw: dict | None) -> IgaConfig:
    raw = dict(raw or {})
    if "lambda" in raw:  # wire alias
        raw["lam"] = raw.pop("lambda")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise HTTPException(400, f"unknown config keys: {sorted(unknown)}")
    try:
        return IgaConfig(**raw)
    except (GroupselError, TypeError) as exc:
        raise HTTPException(400, f"bad config: {exc}") from exc


def _load_inputs(payload: dict) -> tuple[np.ndarray, np.ndarray, GroupPartition]:
    if "bundle" in payload:
        bundle = Path(str(payload["bundle"]))
        ds = load_design(bundle / "X.csv", bundle / "y.csv")
        return ds.X, ds.y, load_groups(bundle / "groups.json")
    try:
        X = np.asarray(payload["x"], dtype=float)
        y = np.asarray(payload["y"], dtype=float)
        partition = partition_from_dict(payload["groups"])
    except KeyError as exc:
        raise HTTPException(400, f"missing field {exc}") from exc
    except (GroupselError, TypeError, ValueError) as exc:
        raise HTTPException(400, f"malformed input: {exc}") from exc
    return X, y, partition


def create_app(snapshot_dir: str | Path | None = None) -> FastAPI:
    """Build the service.  ``snapshot_dir`` persists finished sessions as JSON."""
    app = FastAPI(title="group selection sessions")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    def get_session(sid: str) -> Session:
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"unknown session {sid!r}")
        return sess

    def mutate(sid: str, action) -> dict:
        sess = get_session(sid)
        if not sess.mutex.acquire(blocking=False):
            raise HTTPException(409, "session busy: another mutation is in flight")
        try:
            result = action(sess)
            sess.updated = time.time()
            sess.refresh_state()
            return result if result is not None else sess.state
        finally:
            sess.mutex.release()

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict) -> dict:
        X, y, partition = _load_inputs(payload)
        cfg = _parse_config(payload.get("config"))
        family = str(payload.get("family", "gaussian"))
        try:
            obj = make_objective(family, make_dataset(X, y))
            engine = PathEngine(obj, partition, cfg)
        except GroupselError as exc:
            raise HTTPException(400, f"malformed input: {exc}") from exc
        sid = uuid.uuid4().hex[:16]
        with registry_lock:
            sessions[sid] = Session(sid, engine, family)
        return sessions[sid].view()

    @app.get("/sessions/{sid}")
    def get_state(sid: str) -> dict:
        return get_session(sid).view()

    @app.post("/sessions/{sid}/pick")
    def pick(sid: str, payload: dict) -> dict:
        if "group" not in payload or not isinstance(payload["group"], int):
            raise HTTPException(400, 'body must be {"group": <int, one-based>}')
        group = payload["group"] - 1

        def action(sess: Session):
            if sess.frozen is not None or sess.engine.finished:
                raise HTTPException(409, "session is not awaiting a pick")
            if not 0 <= group < sess.engine.partition.m:
                raise HTTPException(409, f"no such group {group + 1}")
            try:
                sess.engine.pick(group)
            except PolicyError as exc:
                # engine messages carry the internal zero-based id
                detail = str(exc).replace(f"group {group}", f"group {group + 1}")
                raise HTTPException(409, detail) from exc

        return mutate(sid, action)

    @app.post("/sessions/{sid}/auto")
    def auto(sid: str, payload: dict) -> dict:
        steps = payload.get("steps")
        if not isinstance(steps, int) or steps < 0:
            raise HTTPException(400, 'body must be {"steps": <nonnegative int>}')

        def action(sess: Session):
            if sess.frozen is not None or sess.engine.finished:
                raise HTTPException(409, "session is not awaiting a pick")
            sess.engine.auto(steps)

        return mutate(sid, action)

    @app.post("/sessions/{sid}/finish")
    def finish(sid: str) -> dict:
        def action(sess: Session):
            if sess.frozen is not None:
                return sess.frozen
            eng = sess.engine
            eng.halt("finished_by_operator")
            sess.refresh_state()
            result = {
                "state": sess.state,
                "model": {
                    "family": sess.family,
                    "coefficients": [float(v) for v in eng.w],
                    "active_groups": [g + 1 for g in sorted(eng.active)],
                    "Q": eng.Q,
                },
                "path": path_to_dict(eng.path()),
            }
            sess.frozen = result
            if snapshot_dir is not None:
                from .fileio import write_json

                out = Path(snapshot_dir)
                out.mkdir(parents=True, exist_ok=True)
                write_json(out / f"{sess.id}.json", result)
            return result

        return mutate(sid, action)

    return app
