"""Command-line interface: scene generation, planning, rendering, simulation, serving.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .blending import blend_renders, select_k_nearest
from .camera import CameraModel
from .errors import (
    DimensionMismatchError,
    InvalidScaleError,
    InvariantViolation,
    LoadError,
    ScaleUndefinedError,
)
from .evaluation import evaluate, export_policy_run
from .overlay import OverlayConfig, VisualizationMode, error_peak_mpi, error_peak_video, overlay_black
from .planning import llff_plan
from .policies import (
    DEFAULT_CAPTURE_THRESHOLD,
    PolicyId,
    policy_ours,
    policy_random,
    policy_uniform,
)
from .presets import default_camera, scene_catalog
from .rendering import render
from .scene import render_scene

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVARIANT = 4


def _write_json(path: str | None, data: dict) -> None:
    text = json.dumps(data, indent=2)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        print(text)


def cmd_scene(args: argparse.Namespace) -> int:
    catalog = scene_catalog()
    if args.list:
        for name in catalog:
            print(name)
        return EXIT_OK
    if args.preset not in catalog:
        print(f"unknown preset {args.preset!r}; try --list", file=sys.stderr)
        return EXIT_USAGE
    io.save_scene(catalog[args.preset], args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    plan = llff_plan(
        side=args.side,
        width=args.width,
        layer_count=args.layers,
        z_min=args.z_min,
        theta=math.radians(args.theta_deg),
        grid=args.grid,
    )
    _write_json(args.out, plan.to_json())
    return EXIT_OK


def _parse_pose_arg(value: str, intrinsics: CameraModel) -> CameraModel:
    path = Path(value)
    text = path.read_text() if path.is_file() else value
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"pose is neither a file nor inline JSON: {exc}") from exc
    return io.pose_from_json(data, intrinsics)


def cmd_render(args: argparse.Namespace) -> int:
    volumes = [io.load_mpi(d) for d in args.mpi]
    target = _parse_pose_arg(args.pose, volumes[0].reference)
    indices, distances, gamma = select_k_nearest(volumes, target, args.k)
    view = blend_renders([render(volumes[i], target) for i in indices], distances, gamma)

    try:
        mode = VisualizationMode(args.mode)
    except ValueError:
        print(f"unknown mode {args.mode!r}", file=sys.stderr)
        return EXIT_USAGE
    config = OverlayConfig(threshold=args.t)
    if mode == VisualizationMode.BLACK_BG:
        image = overlay_black(view)
    elif mode in (VisualizationMode.ERROR_ON_VIDEO, VisualizationMode.ERROR_ON_MPI):
        if not args.scene:
            print(f"mode {mode.value} needs --scene for the reference view", file=sys.stderr)
            return EXIT_USAGE
        video = render_scene(io.load_scene(args.scene), target).rgb
        if mode == VisualizationMode.ERROR_ON_VIDEO:
            image = error_peak_video(view.color, video, config)
        else:
            image = error_peak_mpi(view, video, config)
    elif mode == VisualizationMode.RAW:
        if not args.scene:
            print("mode RAW needs --scene", file=sys.stderr)
            return EXIT_USAGE
        image = render_scene(io.load_scene(args.scene), target).rgb
    else:  # pragma: no cover - enum is exhaustive
        return EXIT_USAGE

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(io.encode_png(image))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    from .binning import mpi_from_rgbd

    frame = io.load_frame(args.frame)
    valid = frame.depth[frame.valid_mask]
    z_near = args.z_near if args.z_near else max(0.3, float(valid.min()) * 0.95)
    z_far = args.z_far if args.z_far else min(100.0, float(valid.max()) * 1.05)
    mpi = mpi_from_rgbd(frame, args.layers, z_near, z_far)
    io.save_mpi(mpi, args.out)
    print(f"wrote {args.out} ({args.layers} layers, z in [{z_near:.3g}, {z_far:.3g}])")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scene = io.load_scene(args.scene)
    trajectory = io.load_trajectory(args.trajectory)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    ours = policy_ours(
        scene,
        trajectory,
        threshold=args.threshold,
        d=args.layers,
        k=args.k,
        error_threshold=args.t,
    )
    budget = max(ours.capture_count, 2)
    runs = {PolicyId.OURS: ours}
    if args.policy in ("all", "uniform"):
        runs[PolicyId.UNIFORM] = policy_uniform(trajectory, budget)
    if args.policy in ("all", "random"):
        runs[PolicyId.RANDOM] = policy_random(trajectory, budget, args.seed)

    wanted = {
        "all": [PolicyId.OURS, PolicyId.UNIFORM, PolicyId.RANDOM],
        "ours": [PolicyId.OURS],
        "uniform": [PolicyId.UNIFORM],
        "random": [PolicyId.RANDOM],
    }[args.policy]
    for policy_id in wanted:
        export_policy_run(runs[policy_id], scene, trajectory, out / policy_id.value.lower())

    if args.policy == "all":
        report = evaluate(scene, trajectory, [runs[p] for p in wanted], d=args.layers, k=args.k)
        (out / "report.json").write_text(json.dumps(report.to_json(), indent=2))
        (out / "report.txt").write_text(report.to_table() + "\n")
        print(report.to_table())
    else:
        print(f"exported {args.policy} run ({runs[wanted[0]].capture_count} captures); "
              "evaluation needs --policy all")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    scene = io.load_scene(args.scene) if args.scene else scene_catalog()["varying-depth-0"]
    camera = default_camera(width=args.width, height=args.height)
    static_dir = args.static if args.static else _bundled_ui_dir()
    app = create_app(default_scene=scene, camera=camera, static_dir=static_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except SystemExit as exc:  # uvicorn signals startup failure this way
        return EXIT_IO if exc.code else EXIT_OK
    return EXIT_OK


def _bundled_ui_dir() -> str | None:
    for candidate in (
        Path(__file__).resolve().parents[2] / "frontend" / "dist",
        Path.cwd() / "frontend" / "dist",
    ):
        if candidate.is_dir():
            return str(candidate)
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfcapture")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scene", help="write a preset scene spec")
    p.add_argument("--preset", default="varying-depth-0")
    p.add_argument("--out", default="scene.json")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.set_defaults(func=cmd_scene)

    p = sub.add_parser("plan", help="minimum-view capture grid")
    p.add_argument("--side", type=float, required=True, help="capture area side, meters")
    p.add_argument("--width", type=int, required=True, help="image width, pixels")
    p.add_argument("--layers", type=int, default=32)
    p.add_argument("--z-min", type=float, required=True, help="minimum scene depth, meters")
    p.add_argument("--theta-deg", type=float, required=True, help="horizontal FOV, degrees")
    p.add_argument("--grid", choices=("square", "count"), default="square")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("render", help="render saved volume(s) at a pose")
    p.add_argument("--mpi", action="append", required=True, help="volume directory (repeatable)")
    p.add_argument("--pose", required=True, help="JSON file or inline {rotation, center}")
    p.add_argument("--mode", default="BLACK_BG")
    p.add_argument("--scene", help="scene spec for the error/raw modes")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--t", type=float, default=0.4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("convert", help="layer a saved RGBD frame into a volume")
    p.add_argument("--frame", required=True, help="frame directory")
    p.add_argument("--layers", type=int, default=32)
    p.add_argument("--z-near", type=float)
    p.add_argument("--z-far", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("simulate", help="run view-sampling policies and evaluate")
    p.add_argument("--scene", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--policy", choices=("all", "ours", "uniform", "random"), default="all")
    p.add_argument("--threshold", type=float, default=DEFAULT_CAPTURE_THRESHOLD,
                   help="error-rate capture trigger")
    p.add_argument("--t", type=float, default=0.4, help="per-pixel error threshold")
    p.add_argument("--layers", type=int, default=32)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the capture session service")
    p.add_argument("--scene", help="scene spec file (preset used otherwise)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8650)
    p.add_argument("--width", type=int, default=294)
    p.add_argument("--height", type=int, default=639)
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError, LoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (
        InvariantViolation,
        DimensionMismatchError,
        InvalidScaleError,
        ScaleUndefinedError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
