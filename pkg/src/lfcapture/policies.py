"""View-sampling policies: error-driven, equal-spacing, and random selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .binning import depth_bounds_for_scene, mpi_from_rgbd
from .blending import render_blend
from .errors import InvariantViolation
from .mpi import DEFAULT_LAYER_COUNT, MpiVolume
from .overlay import DEFAULT_ERROR_THRESHOLD, error_mask
from .scene import SceneSpec, Trajectory, render_scene

logger = logging.getLogger(__name__)

# Fraction of erroneous pixels above which the error-driven policy inserts a
# new view; the mean rate observed across interactive sessions.
DEFAULT_CAPTURE_THRESHOLD = 0.0428


class PolicyId(str, Enum):
    OURS = "OURS"
    UNIFORM = "UNIFORM"
    RANDOM = "RANDOM"


@dataclass(frozen=True)
class PolicyRun:
    """The capture decisions of one policy over one trajectory.

    ``error_log`` holds the pre-capture error rate at every visited pose and
    is populated by the error-driven policy only.
    """

    policy: PolicyId
    indices: tuple[int, ...]
    trajectory_length: int
    parameters: dict = field(default_factory=dict)
    error_log: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        idx = self.indices
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvariantViolation("capture indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.trajectory_length):
            raise InvariantViolation(
                f"indices {idx[0]}..{idx[-1]} outside trajectory of {self.trajectory_length}"
            )

    @property
    def capture_count(self) -> int:
        return len(self.indices)


def build_volumes(
    scene: SceneSpec,
    trajectory: Trajectory,
    indices: tuple[int, ...] | list[int],
    d: int = DEFAULT_LAYER_COUNT,
    z_near: float | None = None,
    z_far: float | None = None,
) -> list[MpiVolume]:
    """Capture-and-layer the trajectory poses named by ``indices``."""
    hint_near, hint_far = depth_bounds_for_scene(scene)
    z_near = hint_near if z_near is None else z_near
    z_far = hint_far if z_far is None else z_far
    volumes = []
    for i in indices:
        frame = render_scene(scene, trajectory.poses[i])
        volumes.append(mpi_from_rgbd(frame, d, z_near, z_far))
    return volumes


def policy_ours(
    scene: SceneSpec,
    trajectory: Trajectory,
    threshold: float = DEFAULT_CAPTURE_THRESHOLD,
    d: int = DEFAULT_LAYER_COUNT,
    k: int = 3,
    error_threshold: float = DEFAULT_ERROR_THRESHOLD,
) -> PolicyRun:
    """Walk the trajectory and capture wherever the rendered error is too high.

    The first pose is always captured. At every later pose the K-nearest
    blend of the volumes captured so far is compared against the live view;
    a new volume is inserted iff the fraction of erroneous pixels exceeds
    ``threshold``. Every visited pose's error rate is logged (1.0 before the
    first capture, when nothing renders).
    """
    hint_near, hint_far = depth_bounds_for_scene(scene)
    volumes: list[MpiVolume] = []
    selected: list[int] = []
    log: list[float] = []
    for i, pose in enumerate(trajectory.poses):
        if volumes:
            view = render_blend(volumes, pose, k)
            vid = render_scene(scene, pose).rgb
            _, rate = error_mask(view.color, vid, error_threshold)
        else:
            rate = 1.0
        log.append(rate)
        if i == 0 or rate > threshold:
            frame = render_scene(scene, pose)
            volumes.append(mpi_from_rgbd(frame, d, hint_near, hint_far))
            selected.append(i)
            logger.debug("pose %d: error %.4f -> captured (%d total)", i, rate, len(selected))
    return PolicyRun(
        policy=PolicyId.OURS,
        indices=tuple(selected),
        trajectory_length=len(trajectory),
        parameters={"threshold": threshold, "k": k, "layers": d,
                    "error_threshold": error_threshold},
        error_log=tuple(log),
    )


def policy_uniform(trajectory: Trajectory, n: int) -> PolicyRun:
    """Pick ``n`` poses, endpoints included, with the most even spacing.

    Spacing is arc length along the trajectory; the selection minimizes the
    variance of consecutive gaps exactly (dynamic program over prefix
    positions, equivalent to minimizing the sum of squared gaps since the
    gaps always sum to the full path length).
    """
    length = len(trajectory)
    if n < 2:
        raise ValueError(f"uniform selection needs n >= 2, got {n}")
    if n > length:
        raise ValueError(f"cannot pick {n} poses from a trajectory of {length}")
    arc = trajectory.arc_lengths

    # cost[j] = minimal sum of squared gaps reaching index j with m picks.
    gap2 = (arc[None, :] - arc[:, None]) ** 2  # gap2[i, j] = (arc_j - arc_i)^2
    not_before = np.tril(np.ones((length, length), dtype=bool))  # i >= j
    cost = np.full(length, np.inf)
    cost[0] = 0.0
    parent = np.zeros((n, length), dtype=int)
    for m in range(1, n):
        total = cost[:, None] + gap2
        total[not_before] = np.inf  # predecessors must come strictly before j
        parent[m] = np.argmin(total, axis=0)
        cost = total[parent[m], np.arange(length)]

    indices = [length - 1]
    for m in range(n - 1, 0, -1):
        indices.append(int(parent[m][indices[-1]]))
    indices.reverse()
    return PolicyRun(
        policy=PolicyId.UNIFORM,
        indices=tuple(indices),
        trajectory_length=length,
        parameters={"count": n},
    )


def policy_random(trajectory: Trajectory, n: int, seed: int) -> PolicyRun:
    """Uniform sample of ``n`` poses without replacement, sorted, seed-deterministic."""
    length = len(trajectory)
    if not 1 <= n <= length:
        raise ValueError(f"cannot pick {n} poses from a trajectory of {length}")
    rng = np.random.default_rng(seed)
    indices = np.sort(rng.choice(length, size=n, replace=False))
    return PolicyRun(
        policy=PolicyId.RANDOM,
        indices=tuple(int(i) for i in indices),
        trajectory_length=length,
        parameters={"count": n, "seed": seed},
    )
