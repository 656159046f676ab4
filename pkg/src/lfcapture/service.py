"""HTTP + WebSocket front end for capture sessions.

Wire format: poses travel as ``{"rotation": [9 row-major], "center": [3]}``;
streamed frames arrive as a JSON header ``{error_rate, capture_count,
frame_bytes, no_mpi}`` followed by one binary message holding a 4-byte
big-endian length prefix and the PNG payload. All text is UTF-8 JSON.
"""

from __future__ import annotations

import logging
import math
import struct
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from starlette.concurrency import run_in_threadpool
from starlette.staticfiles import StaticFiles

from .camera import CameraModel
from .errors import EmptySessionError, InvariantViolation, LifecycleError, LoadError
from .io import encode_png, load_scene
from .overlay import VisualizationMode
from .presets import default_camera, scene_catalog
from .scene import SceneSpec
from .session import (
    CaptureSession,
    capture,
    create_session,
    export_session,
    request_frame,
)

logger = logging.getLogger(__name__)


class SessionRegistry:
    """Thread-safe session store with per-session command serialization."""

    def __init__(self) -> None:
        self._sessions: dict[str, tuple[CaptureSession, threading.Lock]] = {}
        self._lock = threading.Lock()

    def add(self, session: CaptureSession) -> None:
        with self._lock:
            self._sessions[session.id] = (session, threading.Lock())

    def get(self, session_id: str) -> tuple[CaptureSession, threading.Lock]:
        with self._lock:
            entry = self._sessions.get(session_id)
        if entry is None:
            raise KeyError(session_id)
        return entry


def parse_pose(data: dict, intrinsics: CameraModel) -> CameraModel:
    try:
        rotation = np.asarray(data["rotation"], dtype=np.float64).reshape(3, 3)
        center = np.asarray(data["center"], dtype=np.float64)
        if center.shape != (3,):
            raise ValueError(f"center must have 3 numbers, got {center.shape}")
        return intrinsics.moved_to(center, rotation)
    except (KeyError, TypeError, ValueError, InvariantViolation) as exc:
        raise HTTPException(status_code=400, detail=f"malformed pose: {exc}") from exc


def _resolve_scene(body: dict, default_scene: SceneSpec | None) -> SceneSpec:
    if "scene_path" in body:
        try:
            return load_scene(body["scene_path"])
        except LoadError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
    if "scene_preset" in body:
        catalog = scene_catalog()
        name = body["scene_preset"]
        if name not in catalog:
            raise HTTPException(status_code=400, detail=f"unknown scene preset {name!r}")
        return catalog[name]
    if default_scene is not None:
        return default_scene
    raise HTTPException(status_code=400, detail="no scene given and no default configured")


def create_app(
    default_scene: SceneSpec | None = None,
    camera: CameraModel | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service application.

    Args:
        default_scene: Scene used when session creation omits one.
        camera: Intrinsics for served sessions (portrait default).
        static_dir: Optional directory of UI assets served at ``/``.
    """
    app = FastAPI(title="lfcapture session service")
    registry = SessionRegistry()
    base_camera = camera or default_camera()

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions")
    def create(body: dict | None = None) -> dict:
        body = body or {}
        scene = _resolve_scene(body, default_scene)
        try:
            session = create_session(
                scene,
                base_camera,
                layers=int(body.get("layers", 32)),
                k=int(body.get("k", 3)),
                t=body.get("t"),
                capture_threshold=float(body.get("threshold", 0.0428)),
                jitter_sigma=float(body.get("jitter_sigma", 0.0)),
            )
        except (InvariantViolation, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        registry.add(session)
        logger.info("session %s created (scene %s)", session.id, scene.name)
        return {"session_id": session.id, **session.describe()}

    def _entry(session_id: str) -> tuple[CaptureSession, threading.Lock]:
        try:
            return registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")

    @app.get("/sessions/{session_id}")
    def state(session_id: str) -> dict:
        session, lock = _entry(session_id)
        with lock:
            return session.describe()

    @app.post("/sessions/{session_id}/capture")
    def do_capture(session_id: str, body: dict) -> dict:
        session, lock = _entry(session_id)
        pose = parse_pose(body.get("pose", {}), session.camera)
        with lock:
            try:
                return capture(session, pose)
            except LifecycleError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.post("/sessions/{session_id}/export")
    def do_export(session_id: str, body: dict) -> dict:
        session, lock = _entry(session_id)
        path = body.get("path")
        if not path:
            raise HTTPException(status_code=400, detail="export needs a path")
        with lock:
            try:
                return export_session(session, path)
            except (EmptySessionError, LifecycleError) as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str) -> None:
        try:
            session, lock = registry.get(session_id)
        except KeyError:
            await websocket.close(code=4004, reason=f"unknown session {session_id}")
            return
        await websocket.accept()
        try:
            while True:
                message = await websocket.receive_json()
                try:
                    pose = parse_pose(message.get("pose", {}), session.camera)
                    mode = VisualizationMode(message.get("mode", "BLACK_BG"))
                except (HTTPException, ValueError) as exc:
                    detail = exc.detail if isinstance(exc, HTTPException) else str(exc)
                    await websocket.send_json({"error": detail})
                    continue
                t = message.get("t")

                def serve_frame() -> tuple[bytes, float, int, bool]:
                    with lock:
                        result = request_frame(session, pose, mode, t)
                    png = encode_png(result.image)
                    return png, result.error_rate, result.capture_count, result.no_mpi

                png, rate, count, no_mpi = await run_in_threadpool(serve_frame)
                header = {
                    "error_rate": rate if math.isfinite(rate) else 1.0,
                    "capture_count": count,
                    "frame_bytes": len(png),
                    "no_mpi": no_mpi,
                }
                await websocket.send_json(header)
                await websocket.send_bytes(struct.pack(">I", len(png)) + png)
        except WebSocketDisconnect:
            logger.debug("stream for session %s closed", session_id)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
