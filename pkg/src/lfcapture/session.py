"""Interactive capture session: registered volumes, overlays, and lifecycle.

A session walks EMPTY -> ACTIVE -> EXPORTED. Frame requests are pure reads;
``capture`` is the only mutation besides ``export_session``. The "video" side
of the error overlays is the scene oracle rendered at the requested pose,
optionally jittered to mimic imperfect tracking.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .binning import depth_bounds_for_scene, mpi_from_rgbd
from .blending import render_blend
from .camera import CameraModel
from .errors import EmptySessionError, LifecycleError
from .frame import RgbdFrame
from .io import camera_to_json, save_frame, save_mpi
from .mpi import DEFAULT_LAYER_COUNT, MpiVolume
from .overlay import (
    OverlayConfig,
    VisualizationMode,
    error_mask,
    error_peak_mpi,
    error_peak_video,
    overlay_black,
)
from .policies import DEFAULT_CAPTURE_THRESHOLD
from .rendering import render
from .scaling import compute_scale, rescale_mpi
from .scene import SceneSpec, render_scene


class SessionState(str, Enum):
    EMPTY = "EMPTY"
    ACTIVE = "ACTIVE"
    EXPORTED = "EXPORTED"


@dataclass(frozen=True)
class CaptureRecord:
    pose: CameraModel
    timestamp: float
    error_rate: float
    scale: float
    frame: RgbdFrame = field(repr=False)


@dataclass(frozen=True)
class FrameResult:
    """One served frame plus the stats shown in the capture HUD."""

    image: np.ndarray
    error_rate: float
    capture_count: int
    no_mpi: bool


@dataclass
class CaptureSession:
    """Mutable session state; callers serialize access per session."""

    id: str
    scene: SceneSpec
    camera: CameraModel
    overlay: OverlayConfig
    layers: int = DEFAULT_LAYER_COUNT
    k: int = 3
    capture_threshold: float = DEFAULT_CAPTURE_THRESHOLD
    jitter_sigma: float = 0.0
    volumes: list[MpiVolume] = field(default_factory=list)
    log: list[CaptureRecord] = field(default_factory=list)
    state: SessionState = SessionState.EMPTY

    @property
    def capture_count(self) -> int:
        return len(self.volumes)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "state": self.state.value,
            "capture_count": self.capture_count,
            "scene": self.scene.name,
            "parameters": {
                "layers": self.layers,
                "k": self.k,
                "t": self.overlay.threshold,
                "threshold": self.capture_threshold,
                "jitter_sigma": self.jitter_sigma,
                "width": self.camera.width,
                "height": self.camera.height,
            },
            "log": [
                {
                    "timestamp": rec.timestamp,
                    "error_rate": rec.error_rate,
                    "scale": rec.scale,
                    "center": rec.pose.translation.tolist(),
                }
                for rec in self.log
            ],
        }


def create_session(
    scene: SceneSpec,
    camera: CameraModel,
    layers: int = DEFAULT_LAYER_COUNT,
    k: int = 3,
    t: float | None = None,
    capture_threshold: float = DEFAULT_CAPTURE_THRESHOLD,
    jitter_sigma: float = 0.0,
    session_id: str | None = None,
) -> CaptureSession:
    """New EMPTY session with the capture defaults."""
    overlay = OverlayConfig() if t is None else OverlayConfig(threshold=t)
    return CaptureSession(
        id=session_id or uuid.uuid4().hex,
        scene=scene,
        camera=camera,
        overlay=overlay,
        layers=layers,
        k=k,
        capture_threshold=capture_threshold,
        jitter_sigma=jitter_sigma,
    )


def _video_pose(session: CaptureSession, pose: CameraModel) -> CameraModel:
    """Pose of the simulated camera feed; jitter models tracking error."""
    if session.jitter_sigma <= 0:
        return pose
    digest = hashlib.blake2b(
        pose.translation.tobytes() + pose.rotation.tobytes() + session.id.encode(),
        digest_size=8,
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    offset = rng.normal(0.0, session.jitter_sigma, size=3)
    return pose.moved_to(pose.translation + offset)


def request_frame(
    session: CaptureSession,
    pose: CameraModel,
    mode: VisualizationMode,
    t: float | None = None,
) -> FrameResult:
    """Render the session's view of a pose under a visualization mode.

    EMPTY sessions serve the raw oracle view (the pre-first-capture phase)
    with an error rate of 1. Never mutates the session.
    """
    video = render_scene(session.scene, _video_pose(session, pose)).rgb
    if session.state == SessionState.EMPTY:
        return FrameResult(image=video, error_rate=1.0, capture_count=0, no_mpi=True)

    config = session.overlay if t is None else OverlayConfig(
        mode=session.overlay.mode,
        error_color=session.overlay.error_color,
        threshold=t,
        background=session.overlay.background,
        channel_mean=session.overlay.channel_mean,
    )
    view = render_blend(session.volumes, pose, session.k)
    _, rate = error_mask(view.color, video, config.threshold, config.channel_mean)
    if mode == VisualizationMode.RAW:
        image = video
    elif mode == VisualizationMode.BLACK_BG:
        image = overlay_black(view, config.background)
    elif mode == VisualizationMode.ERROR_ON_VIDEO:
        image = error_peak_video(view.color, video, config)
    elif mode == VisualizationMode.ERROR_ON_MPI:
        image = error_peak_mpi(view, video, config)
    else:
        raise ValueError(f"unknown visualization mode {mode!r}")
    return FrameResult(
        image=np.asarray(image, dtype=np.float32),
        error_rate=rate,
        capture_count=session.capture_count,
        no_mpi=False,
    )


def capture(session: CaptureSession, pose: CameraModel) -> dict:
    """Capture at a pose: build, scale-align, and register a new volume.

    The frame's metric depth and the fresh volume's rendered disparity give
    the scale factor (close to 1 here, since the oracle depth is already
    metric); the volume registers rescaled. The log records the pre-capture
    error rate at the pose.

    Raises:
        LifecycleError: If the session was already exported.
    """
    if session.state == SessionState.EXPORTED:
        raise LifecycleError("cannot capture on an exported session")
    if session.state == SessionState.EMPTY:
        pre_rate = 1.0
    else:
        video = render_scene(session.scene, _video_pose(session, pose)).rgb
        view = render_blend(session.volumes, pose, session.k)
        _, pre_rate = error_mask(
            view.color, video, session.overlay.threshold, session.overlay.channel_mean
        )

    frame = render_scene(session.scene, pose)
    z_near, z_far = depth_bounds_for_scene(session.scene)
    mpi = mpi_from_rgbd(frame, session.layers, z_near, z_far)
    self_view = render(mpi, frame.camera)
    s = compute_scale(frame.depth, self_view.disparity)
    mpi = rescale_mpi(mpi, s)

    session.volumes.append(mpi)
    session.log.append(
        CaptureRecord(pose=pose, timestamp=time.time(), error_rate=pre_rate,
                      scale=s, frame=frame)
    )
    session.state = SessionState.ACTIVE
    return {
        "capture_count": session.capture_count,
        "error_rate": pre_rate,
        "scale": s,
        "state": session.state.value,
    }


def export_session(session: CaptureSession, directory: str | Path) -> dict:
    """Write frames, volumes, and the capture log; the session becomes EXPORTED."""
    if session.state == SessionState.EMPTY:
        raise EmptySessionError("nothing to export: no captures")
    if session.state == SessionState.EXPORTED:
        raise LifecycleError("session was already exported")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, rec in enumerate(session.log):
        save_frame(rec.frame, directory / f"frame_{i:04d}")
        save_mpi(session.volumes[i], directory / f"volume_{i:04d}")
        entries.append(
            {
                "frame": f"frame_{i:04d}",
                "volume": f"volume_{i:04d}",
                "timestamp": rec.timestamp,
                "error_rate": rec.error_rate,
                "scale": rec.scale,
                "camera": camera_to_json(rec.pose),
            }
        )
    manifest = {
        "session_id": session.id,
        "scene": session.scene.name,
        "parameters": session.describe()["parameters"],
        "captures": entries,
    }
    (directory / "session.json").write_text(json.dumps(manifest, indent=2))
    session.state = SessionState.EXPORTED
    return manifest
