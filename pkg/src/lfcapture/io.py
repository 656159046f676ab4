"""File formats: volume directories, RGBD frames, trajectories, and scene specs.

Color images persist as 8-bit PNG, depth as 16-bit millimeter PNG (0 = no
measurement), densities as raw little-endian float32, and everything else as
JSON manifests. Loads re-validate every type invariant and raise ``LoadError``
naming the violation.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .camera import CameraModel
from .errors import InvariantViolation, LoadError
from .frame import RgbdFrame
from .mpi import MpiLayer, MpiVolume
from .scene import (
    BoxPrimitive,
    CheckerTexture,
    GradientTexture,
    ImageTexture,
    PlaidTexture,
    Primitive,
    RectanglePrimitive,
    SceneSpec,
    SolidTexture,
    Texture,
    Trajectory,
)

MPI_MANIFEST = "manifest.json"
FRAME_MANIFEST = "manifest.json"


# --------------------------------------------------------------------------
# Image helpers


def _save_color_png(path: Path, rgb: np.ndarray) -> None:
    data = np.clip(np.round(np.asarray(rgb) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(path)


def _load_color_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        data = np.asarray(img.convert("RGB"), dtype=np.float32)
    return data / 255.0


def _save_depth_png(path: Path, depth: np.ndarray) -> None:
    mm = np.clip(np.round(np.asarray(depth) * 1000.0), 0, 65535).astype(np.uint16)
    Image.fromarray(mm).save(path)


def _load_depth_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        mm = np.asarray(img, dtype=np.float32)
    return mm / 1000.0


def encode_png(rgb: np.ndarray) -> bytes:
    """Deterministic PNG bytes for a float RGB image in [0, 1]."""
    import io as _io

    data = np.clip(np.round(np.asarray(rgb) * 255.0), 0, 255).astype(np.uint8)
    buf = _io.BytesIO()
    Image.fromarray(data, mode="RGB").save(buf, format="PNG", compress_level=6)
    return buf.getvalue()


# --------------------------------------------------------------------------
# Camera / pose JSON


def camera_to_json(camera: CameraModel) -> dict:
    return {
        "f": camera.f,
        "cx": camera.cx,
        "cy": camera.cy,
        "width": camera.width,
        "height": camera.height,
        "rotation": camera.rotation.reshape(-1).tolist(),
        "translation": camera.translation.tolist(),
    }


def camera_from_json(data: dict) -> CameraModel:
    try:
        return CameraModel(
            f=float(data["f"]),
            cx=float(data["cx"]),
            cy=float(data["cy"]),
            width=int(data["width"]),
            height=int(data["height"]),
            rotation=np.asarray(data["rotation"], dtype=np.float64).reshape(3, 3),
            translation=np.asarray(data["translation"], dtype=np.float64),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise LoadError(f"bad camera record: {exc}") from exc


def pose_from_json(data: dict, intrinsics: CameraModel) -> CameraModel:
    """Camera at a serialized pose, intrinsics taken from another camera."""
    try:
        rotation = np.asarray(data["rotation"], dtype=np.float64).reshape(3, 3)
        center = np.asarray(
            data["center"] if "center" in data else data["translation"], dtype=np.float64
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise LoadError(f"bad pose record: {exc}") from exc
    try:
        return intrinsics.moved_to(center, rotation)
    except InvariantViolation as exc:
        raise LoadError(str(exc)) from exc


# --------------------------------------------------------------------------
# Volume directories


def save_mpi(mpi: MpiVolume, directory: str | Path) -> Path:
    """Write a volume as a directory: JSON manifest plus per-layer images.

    Layer files are 1-based: ``layer_1`` is the closest plane.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cam = mpi.reference
    manifest = {
        "resolution": [cam.width, cam.height],
        "f": cam.f,
        "cx": cam.cx,
        "cy": cam.cy,
        "pose": {
            "rotation": cam.rotation.reshape(-1).tolist(),
            "translation": cam.translation.tolist(),
        },
        "scale": mpi.scale,
        "layer_depths": [layer.depth for layer in mpi.layers],
    }
    (directory / MPI_MANIFEST).write_text(json.dumps(manifest, indent=2))
    for i, layer in enumerate(mpi.layers, start=1):
        _save_color_png(directory / f"layer_{i}.color.png", layer.color)
        layer.density.astype("<f4").tofile(directory / f"layer_{i}.sigma.f32")
    return directory


def load_mpi(directory: str | Path) -> MpiVolume:
    directory = Path(directory)
    manifest_path = directory / MPI_MANIFEST
    if not manifest_path.is_file():
        raise LoadError(f"no volume manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise LoadError(f"malformed manifest: {exc}") from exc

    try:
        width, height = (int(v) for v in manifest["resolution"])
        pose = manifest["pose"]
        camera = CameraModel(
            f=float(manifest["f"]),
            cx=float(manifest["cx"]),
            cy=float(manifest["cy"]),
            width=width,
            height=height,
            rotation=np.asarray(pose["rotation"], dtype=np.float64).reshape(3, 3),
            translation=np.asarray(pose["translation"], dtype=np.float64),
        )
        scale = float(manifest["scale"])
        depths = [float(z) for z in manifest["layer_depths"]]
    except (KeyError, ValueError, TypeError, InvariantViolation) as exc:
        raise LoadError(f"bad manifest fields: {exc}") from exc

    if not depths:
        raise LoadError("manifest lists no layers")
    layers = []
    for i, depth in enumerate(depths, start=1):
        color_path = directory / f"layer_{i}.color.png"
        sigma_path = directory / f"layer_{i}.sigma.f32"
        if not color_path.is_file() or not sigma_path.is_file():
            raise LoadError(f"missing files for layer {i}")
        color = _load_color_png(color_path)
        sigma = np.fromfile(sigma_path, dtype="<f4")
        if sigma.size != width * height:
            raise LoadError(
                f"layer {i} density has {sigma.size} values, expected {width * height}"
            )
        sigma = sigma.reshape(height, width)
        try:
            layers.append(MpiLayer(color=color, density=sigma, depth=depth))
        except (InvariantViolation, ValueError) as exc:
            raise LoadError(f"layer {i}: {exc}") from exc
    try:
        return MpiVolume(layers=tuple(layers), reference=camera, scale=scale)
    except (InvariantViolation, ValueError) as exc:
        raise LoadError(str(exc)) from exc


# --------------------------------------------------------------------------
# Frame directories


def save_frame(frame: RgbdFrame, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _save_color_png(directory / "color.png", frame.rgb)
    _save_depth_png(directory / "depth.png", frame.depth)
    manifest = {"camera": camera_to_json(frame.camera)}
    (directory / FRAME_MANIFEST).write_text(json.dumps(manifest, indent=2))
    return directory


def load_frame(directory: str | Path) -> RgbdFrame:
    directory = Path(directory)
    manifest_path = directory / FRAME_MANIFEST
    if not manifest_path.is_file():
        raise LoadError(f"no frame manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
        camera = camera_from_json(manifest["camera"])
    except (json.JSONDecodeError, KeyError) as exc:
        raise LoadError(f"malformed frame manifest: {exc}") from exc
    rgb = _load_color_png(directory / "color.png")
    depth = _load_depth_png(directory / "depth.png")
    try:
        return RgbdFrame(rgb=rgb, depth=depth, camera=camera)
    except (InvariantViolation, ValueError) as exc:
        raise LoadError(str(exc)) from exc


# --------------------------------------------------------------------------
# Trajectories


def save_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    first = trajectory.poses[0]
    data = {
        "intrinsics": {
            "f": first.f,
            "cx": first.cx,
            "cy": first.cy,
            "width": first.width,
            "height": first.height,
        },
        "poses": [
            {
                "rotation": p.rotation.reshape(-1).tolist(),
                "translation": p.translation.tolist(),
            }
            for p in trajectory.poses
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2))
    return path


def load_trajectory(path: str | Path) -> Trajectory:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
        intr = data["intrinsics"]
        base = CameraModel(
            f=float(intr["f"]),
            cx=float(intr["cx"]),
            cy=float(intr["cy"]),
            width=int(intr["width"]),
            height=int(intr["height"]),
        )
        poses = tuple(pose_from_json(p, base) for p in data["poses"])
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise LoadError(f"malformed trajectory file: {exc}") from exc
    except InvariantViolation as exc:
        raise LoadError(str(exc)) from exc
    try:
        return Trajectory(poses=poses)
    except InvariantViolation as exc:
        raise LoadError(str(exc)) from exc


# --------------------------------------------------------------------------
# Scene specs

_TEXTURE_TAGS = {
    "solid": SolidTexture,
    "checker": CheckerTexture,
    "gradient": GradientTexture,
    "plaid": PlaidTexture,
}


def _texture_to_json(texture: Texture) -> dict:
    if isinstance(texture, SolidTexture):
        return {"type": "solid", "color": list(texture.color)}
    if isinstance(texture, CheckerTexture):
        return {
            "type": "checker",
            "squares_x": texture.squares_x,
            "squares_y": texture.squares_y,
            "color_a": list(texture.color_a),
            "color_b": list(texture.color_b),
        }
    if isinstance(texture, GradientTexture):
        return {
            "type": "gradient",
            "color_a": list(texture.color_a),
            "color_b": list(texture.color_b),
            "v_weight": texture.v_weight,
        }
    if isinstance(texture, PlaidTexture):
        return {
            "type": "plaid",
            "color_a": list(texture.color_a),
            "color_b": list(texture.color_b),
            "cycles_u": texture.cycles_u,
            "cycles_v": texture.cycles_v,
            "phase": texture.phase,
        }
    if isinstance(texture, ImageTexture):
        if texture.source is None:
            raise ValueError("image texture without a source path cannot be serialized")
        return {"type": "image", "path": texture.source}
    raise ValueError(f"unknown texture type {type(texture).__name__}")


def _texture_from_json(data: dict, base_dir: Path) -> Texture:
    kind = data.get("type")
    if kind == "image":
        path = base_dir / data["path"]
        if not path.is_file():
            raise LoadError(f"texture image not found: {path}")
        return ImageTexture(image=_load_color_png(path), source=data["path"])
    cls = _TEXTURE_TAGS.get(kind)
    if cls is None:
        raise LoadError(f"unknown texture type {kind!r}")
    kwargs = {k: v for k, v in data.items() if k != "type"}
    for key in ("color", "color_a", "color_b"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise LoadError(f"bad texture fields for {kind!r}: {exc}") from exc


def _primitive_to_json(prim: Primitive) -> dict:
    common = {
        "size": list(prim.size),
        "rotation": prim.rotation.reshape(-1).tolist(),
        "translation": prim.translation.tolist(),
        "texture": _texture_to_json(prim.texture),
    }
    if isinstance(prim, RectanglePrimitive):
        return {"type": "rectangle", **common}
    if isinstance(prim, BoxPrimitive):
        return {"type": "box", **common}
    raise ValueError(f"unknown primitive type {type(prim).__name__}")


def _primitive_from_json(data: dict, base_dir: Path) -> Primitive:
    kind = data.get("type")
    if kind not in ("rectangle", "box"):
        raise LoadError(f"unknown primitive type {kind!r}")
    try:
        texture = _texture_from_json(data["texture"], base_dir)
        size = tuple(float(v) for v in data["size"])
        rotation = np.asarray(data.get("rotation", np.eye(3).reshape(-1).tolist()),
                              dtype=np.float64).reshape(3, 3)
        translation = np.asarray(data.get("translation", [0.0, 0.0, 0.0]), dtype=np.float64)
        cls = RectanglePrimitive if kind == "rectangle" else BoxPrimitive
        return cls(size=size, texture=texture, rotation=rotation, translation=translation)
    except (KeyError, ValueError, TypeError, InvariantViolation) as exc:
        raise LoadError(f"bad {kind} record: {exc}") from exc


def save_scene(scene: SceneSpec, path: str | Path) -> Path:
    path = Path(path)
    data = {
        "name": scene.name,
        "background": list(scene.background),
        "depth_range": list(scene.depth_range),
        "primitives": [_primitive_to_json(p) for p in scene.primitives],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2))
    return path


def load_scene(path: str | Path) -> SceneSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read scene file {path}: {exc}") from exc
    try:
        primitives = tuple(
            _primitive_from_json(p, path.parent) for p in data["primitives"]
        )
        return SceneSpec(
            primitives=primitives,
            background=tuple(data.get("background", (0.0, 0.0, 0.0))),
            depth_range=tuple(data.get("depth_range", (0.5, 3.0))),
            name=data.get("name", path.stem),
        )
    except (KeyError, TypeError) as exc:
        raise LoadError(f"malformed scene file: {exc}") from exc
    except InvariantViolation as exc:
        raise LoadError(str(exc)) from exc
