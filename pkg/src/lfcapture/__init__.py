"""Local light-field capture toolkit.

Reconstructs local light fields as stacks of RGB+density planes, renders them
to novel views, visualizes reconstruction error as a peaking overlay, and
simulates/evaluates view-sampling policies against a synthetic RGBD scene
oracle.
"""

from .binning import depth_bounds_for_scene, layer_depths_uniform_disparity, mpi_from_rgbd
from .blending import blend_renders, blend_weights, render_blend, select_k_nearest
from .camera import CameraModel
from .errors import (
    DimensionMismatchError,
    EmptySessionError,
    InvalidScaleError,
    InvariantViolation,
    LifecycleError,
    LoadError,
    ScaleUndefinedError,
)
from .evaluation import EvalReport, PolicyScore, evaluate, export_policy_run, midpoint_poses
from .frame import DEPTH_SENTINEL, RgbdFrame
from .io import (
    load_frame,
    load_mpi,
    load_scene,
    load_trajectory,
    save_frame,
    save_mpi,
    save_scene,
    save_trajectory,
)
from .metrics import psnr, ssim
from .mpi import DEFAULT_LAYER_COUNT, MpiLayer, MpiVolume, RenderedView, WarpedStack
from .overlay import (
    DEFAULT_ERROR_THRESHOLD,
    OverlayConfig,
    VisualizationMode,
    error_mask,
    error_peak_mpi,
    error_peak_video,
    overlay_black,
)
from .planning import LlffPlan, llff_plan, minimum_view_count
from .policies import (
    DEFAULT_CAPTURE_THRESHOLD,
    PolicyId,
    PolicyRun,
    build_volumes,
    policy_ours,
    policy_random,
    policy_uniform,
)
from .rendering import bilinear_sample, composite, ray_deltas, render, warp_layer, warp_volume
from .scaling import ScaleEstimateWarning, compute_scale, rescale_mpi
from .scene import (
    BoxPrimitive,
    CheckerTexture,
    GradientTexture,
    ImageTexture,
    PlaidTexture,
    RectanglePrimitive,
    SceneSpec,
    SolidTexture,
    Trajectory,
    line_trajectory,
    render_scene,
)
from .session import (
    CaptureSession,
    FrameResult,
    SessionState,
    capture,
    create_session,
    export_session,
    request_frame,
)

__version__ = "0.1.0"

__all__ = [
    "BoxPrimitive",
    "CameraModel",
    "CaptureSession",
    "CheckerTexture",
    "DEFAULT_CAPTURE_THRESHOLD",
    "DEFAULT_ERROR_THRESHOLD",
    "DEFAULT_LAYER_COUNT",
    "DEPTH_SENTINEL",
    "DimensionMismatchError",
    "EmptySessionError",
    "EvalReport",
    "FrameResult",
    "GradientTexture",
    "ImageTexture",
    "InvalidScaleError",
    "InvariantViolation",
    "LifecycleError",
    "LlffPlan",
    "LoadError",
    "MpiLayer",
    "MpiVolume",
    "OverlayConfig",
    "PlaidTexture",
    "PolicyId",
    "PolicyRun",
    "PolicyScore",
    "RectanglePrimitive",
    "RenderedView",
    "RgbdFrame",
    "ScaleEstimateWarning",
    "ScaleUndefinedError",
    "SceneSpec",
    "SessionState",
    "SolidTexture",
    "Trajectory",
    "VisualizationMode",
    "WarpedStack",
    "bilinear_sample",
    "blend_renders",
    "blend_weights",
    "build_volumes",
    "capture",
    "composite",
    "compute_scale",
    "create_session",
    "depth_bounds_for_scene",
    "error_mask",
    "error_peak_mpi",
    "error_peak_video",
    "evaluate",
    "export_policy_run",
    "export_session",
    "layer_depths_uniform_disparity",
    "line_trajectory",
    "llff_plan",
    "load_frame",
    "load_mpi",
    "load_scene",
    "load_trajectory",
    "midpoint_poses",
    "minimum_view_count",
    "mpi_from_rgbd",
    "overlay_black",
    "policy_ours",
    "policy_random",
    "policy_uniform",
    "psnr",
    "ray_deltas",
    "render",
    "render_blend",
    "render_scene",
    "request_frame",
    "rescale_mpi",
    "save_frame",
    "save_mpi",
    "save_scene",
    "save_trajectory",
    "select_k_nearest",
    "ssim",
    "warp_layer",
    "warp_volume",
]
