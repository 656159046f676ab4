"""Policy evaluation: render quality at held-out poses, reported as ratios.

Ground-truth poses sit midway between consecutive picks of the equal-spacing
policy; every policy is scored there against the scene oracle, and rows are
normalized to the error-driven policy so scores compare across scenes.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blending import render_blend
from .camera import CameraModel
from .io import camera_to_json, save_frame
from .metrics import psnr, ssim
from .mpi import DEFAULT_LAYER_COUNT
from .policies import PolicyId, PolicyRun, build_volumes
from .scene import SceneSpec, Trajectory, render_scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyScore:
    """One report row: absolute means and ratios relative to the OURS row."""

    policy: str
    capture_count: int
    mean_psnr: float
    mean_ssim: float
    psnr_ratio: float
    ssim_ratio: float


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[PolicyScore, ...]
    gt_pose_count: int
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "gt_pose_count": self.gt_pose_count,
            "notes": list(self.notes),
            "rows": [
                {
                    "policy": r.policy,
                    "capture_count": r.capture_count,
                    "psnr": r.mean_psnr,
                    "ssim": r.mean_ssim,
                    "psnr_ratio": r.psnr_ratio,
                    "ssim_ratio": r.ssim_ratio,
                }
                for r in self.rows
            ],
        }

    def to_table(self) -> str:
        lines = [
            f"{'policy':<10} {'views':>5} {'PSNR':>8} {'SSIM':>7} {'PSNR ratio':>11} {'SSIM ratio':>11}"
        ]
        for r in self.rows:
            lines.append(
                f"{r.policy:<10} {r.capture_count:>5d} {r.mean_psnr:>8.2f} "
                f"{r.mean_ssim:>7.4f} {r.psnr_ratio:>11.3f} {r.ssim_ratio:>11.3f}"
            )
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def midpoint_poses(trajectory: Trajectory, indices: tuple[int, ...]) -> list[CameraModel]:
    """Held-out poses midway between consecutive selected trajectory poses.

    Centers interpolate linearly; orientation copies the earlier pose (the
    usual trajectories share one orientation anyway).
    """
    poses = []
    for a, b in zip(indices, indices[1:]):
        pa = trajectory.poses[a]
        pb = trajectory.poses[b]
        center = (pa.translation + pb.translation) / 2.0
        poses.append(pa.moved_to(center))
    return poses


def evaluate(
    scene: SceneSpec,
    trajectory: Trajectory,
    runs: list[PolicyRun] | tuple[PolicyRun, ...],
    d: int = DEFAULT_LAYER_COUNT,
    k: int = 3,
) -> EvalReport:
    """Score policy runs at held-out poses and normalize to the OURS row.

    Args:
        scene: Oracle scene all runs captured from.
        trajectory: The shared trajectory the runs walked.
        runs: Policy runs; one UNIFORM run is required (its picks define the
            ground-truth poses). Runs with zero captures are excluded with a
            note.
        d: Layer count for rebuilding capture volumes.
        k: Blend size at evaluation poses.

    Raises:
        ValueError: If no UNIFORM run is present or ground truth is degenerate.
    """
    uniform = next((r for r in runs if r.policy == PolicyId.UNIFORM), None)
    if uniform is None:
        raise ValueError("evaluation needs a UNIFORM run to place ground-truth poses")
    gt_poses = midpoint_poses(trajectory, uniform.indices)
    if not gt_poses:
        raise ValueError("UNIFORM run has fewer than two picks; no ground-truth poses")
    gt_frames = [render_scene(scene, pose) for pose in gt_poses]

    notes: list[str] = []
    means: dict[int, tuple[float, float]] = {}
    scored: list[PolicyRun] = []
    for run_idx, run in enumerate(runs):
        if run.capture_count == 0:
            notes.append(f"run {run_idx} ({run.policy.value}) excluded: zero captures")
            continue
        volumes = build_volumes(scene, trajectory, run.indices, d)
        psnrs = []
        ssims = []
        for pose, gt in zip(gt_poses, gt_frames):
            view = render_blend(volumes, pose, k)
            psnrs.append(psnr(view.color, gt.rgb))
            ssims.append(ssim(view.color, gt.rgb))
        means[run_idx] = (float(np.mean(psnrs)), float(np.mean(ssims)))
        scored.append(run)
        logger.debug("run %d (%s): PSNR %.2f SSIM %.4f",
                     run_idx, run.policy.value, *means[run_idx])

    ours_idx = next(
        (i for i, r in enumerate(runs) if r.policy == PolicyId.OURS and i in means), None
    )
    if ours_idx is None:
        notes.append("no OURS run with captures; ratios are undefined")
    rows = []
    for run_idx, run in enumerate(runs):
        if run_idx not in means:
            continue
        mean_psnr, mean_ssim = means[run_idx]
        if ours_idx is None:
            pr = sr = math.nan
        else:
            ours_psnr, ours_ssim = means[ours_idx]
            pr = mean_psnr / ours_psnr
            sr = mean_ssim / ours_ssim
        rows.append(
            PolicyScore(
                policy=run.policy.value,
                capture_count=run.capture_count,
                mean_psnr=mean_psnr,
                mean_ssim=mean_ssim,
                psnr_ratio=pr,
                ssim_ratio=sr,
            )
        )
    return EvalReport(rows=tuple(rows), gt_pose_count=len(gt_poses), notes=tuple(notes))


def export_policy_run(
    run: PolicyRun,
    scene: SceneSpec,
    trajectory: Trajectory,
    directory: str | Path,
) -> Path:
    """Write a run's captured frames and pose manifest for external pipelines."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    poses = []
    for order, idx in enumerate(run.indices):
        pose = trajectory.poses[idx]
        frame = render_scene(scene, pose)
        save_frame(frame, directory / f"frame_{order:04d}")
        poses.append({"trajectory_index": idx, "camera": camera_to_json(pose)})
    manifest = {
        "policy": run.policy.value,
        "parameters": run.parameters,
        "trajectory_length": run.trajectory_length,
        "indices": list(run.indices),
        "error_log": list(run.error_log),
        "poses": poses,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return directory
