"""Perspective <-> equirectangular rasterization and clip-level alignment.

Both directions use inverse mapping: iterate destination pixels, pull from the
source with bilinear interpolation. That leaves no holes and needs no
splatting. The frustum test is exact pinhole geometry: a world direction is
visible when its camera-frame forward component is positive and the slopes
|side/fwd|, |up/fwd| stay within tan of the half-FoVs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from panokit.raster import (
    EquirectFrame,
    PerspectiveFrame,
    VideoClip,
    sample_bilinear_wrapped_grid,
)
from panokit.sphere import EulerPose, FieldOfView, relative_pose, rotation_from_pose

__all__ = [
    "Trajectory",
    "WindowPlan",
    "equirect_dir_grid",
    "camera_ray_grid",
    "project_to_equirect",
    "unwrap_to_perspective",
    "align_clip",
    "plan_windows",
]

DEFAULT_EQUIRECT_HEIGHT = 512


@dataclass(frozen=True)
class Trajectory:
    """Per-frame poses plus the clip-wide field of view."""

    poses: tuple
    fov: FieldOfView

    def __post_init__(self):
        poses = tuple(self.poses)
        if not poses:
            raise ValueError("a trajectory needs at least one pose")
        if not all(isinstance(p, EulerPose) for p in poses):
            raise ValueError("trajectory poses must be EulerPose values")
        object.__setattr__(self, "poses", poses)

    def __len__(self) -> int:
        return len(self.poses)


@dataclass(frozen=True)
class WindowPlan:
    """Overlapping frame ranges for iterative long-clip processing."""

    windows: tuple
    window: int
    context: int

    def __post_init__(self):
        windows = tuple((int(a), int(b)) for a, b in self.windows)
        if not windows or windows[0][0] != 0:
            raise ValueError("the first window must start at frame 0")
        if not (0 < self.context < self.window):
            raise ValueError("need 0 < context < window")
        for (a0, b0), (a1, b1) in zip(windows, windows[1:]):
            overlap = b0 - a1
            if overlap < self.context:
                raise ValueError(
                    f"windows [{a0},{b0}) and [{a1},{b1}) overlap by {overlap} < context {self.context}"
                )
        object.__setattr__(self, "windows", windows)


@functools.lru_cache(maxsize=4)
def equirect_dir_grid(w_eq: int, h_eq: int) -> np.ndarray:
    """(H, W, 3) unit world directions at equirect texel centers. Cached."""
    if h_eq < 1 or w_eq != 2 * h_eq:
        raise ValueError(f"equirect map must be 2:1 (W=2H), got {w_eq}x{h_eq}")
    theta = 2.0 * math.pi * np.arange(w_eq) / w_eq - math.pi
    phi = math.pi / 2.0 - math.pi * np.arange(h_eq) / h_eq
    cphi = np.cos(phi)[:, None]
    dirs = np.empty((h_eq, w_eq, 3))
    dirs[..., 0] = cphi * np.cos(theta)[None, :]
    dirs[..., 1] = cphi * np.sin(theta)[None, :]
    dirs[..., 2] = np.sin(phi)[:, None]
    dirs.setflags(write=False)
    return dirs


@functools.lru_cache(maxsize=16)
def _camera_ray_grid_cached(w: int, h: int, hfov: float, vfov: float) -> np.ndarray:
    x_ndc = 2.0 * np.arange(w) / w - 1.0
    y_ndc = 2.0 * np.arange(h) / h - 1.0
    rays = np.empty((h, w, 3))
    rays[..., 0] = 1.0
    rays[..., 1] = (x_ndc * math.tan(hfov / 2.0))[None, :]
    rays[..., 2] = (-y_ndc * math.tan(vfov / 2.0))[:, None]
    rays /= np.linalg.norm(rays, axis=-1, keepdims=True)
    rays.setflags(write=False)
    return rays


def camera_ray_grid(w: int, h: int, fov: FieldOfView) -> np.ndarray:
    """(H, W, 3) unit camera rays at perspective texel centers. Cached."""
    return _camera_ray_grid_cached(w, h, fov.horizontal, fov.vertical)


def _sample_bilinear_clamped(rgb: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    h, w = rgb.shape[:2]
    u = np.clip(u, 0.0, w - 1)
    v = np.clip(v, 0.0, h - 1)
    u0 = np.floor(u).astype(np.intp)
    v0 = np.floor(v).astype(np.intp)
    fu = (u - u0)[..., None]
    fv = (v - v0)[..., None]
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    top = rgb[v0, u0] * (1.0 - fu) + rgb[v0, u1] * fu
    bot = rgb[v1, u0] * (1.0 - fu) + rgb[v1, u1] * fu
    return top * (1.0 - fv) + bot * fv


def project_to_equirect(
    frame: PerspectiveFrame,
    pose: EulerPose,
    fov: FieldOfView,
    h_eq: int = DEFAULT_EQUIRECT_HEIGHT,
) -> EquirectFrame:
    """Paint a perspective frame onto a masked equirect map; unmapped areas stay black."""
    if h_eq < 64:
        raise ValueError(f"equirect height must be at least 64, got {h_eq}")
    w_eq = 2 * h_eq
    dirs = equirect_dir_grid(w_eq, h_eq)
    R = rotation_from_pose(pose)
    cam = dirs @ R  # rows are world dirs; dirs @ R == (R.T @ d) per pixel
    fwd, side, up = cam[..., 0], cam[..., 1], cam[..., 2]

    ta = math.tan(fov.horizontal / 2.0)
    tb = math.tan(fov.vertical / 2.0)
    inside = (fwd > 0) & (np.abs(side) <= fwd * ta) & (np.abs(up) <= fwd * tb)

    out = np.zeros((h_eq, w_eq, 3), dtype=np.float32)
    if inside.any():
        f_in = fwd[inside]
        x_ndc = side[inside] / (f_in * ta)
        y_ndc = -up[inside] / (f_in * tb)
        u = (x_ndc + 1.0) * frame.width / 2.0
        v = (y_ndc + 1.0) * frame.height / 2.0
        out[inside] = _sample_bilinear_clamped(frame.rgb, u, v)
    return EquirectFrame(rgb=np.clip(out, 0.0, 1.0), mask=inside)


def unwrap_to_perspective(
    f: EquirectFrame, pose: EulerPose, fov: FieldOfView, w: int, h: int
) -> PerspectiveFrame:
    """Extract the pinhole view looking along ``pose`` from an equirect frame."""
    rays = camera_ray_grid(w, h, fov)
    R = rotation_from_pose(pose)
    world = rays @ R.T
    theta = np.arctan2(world[..., 1], world[..., 0])
    phi = np.arcsin(np.clip(world[..., 2], -1.0, 1.0))
    u = f.width * (theta + math.pi) / (2.0 * math.pi)
    v = f.height * (math.pi / 2.0 - phi) / math.pi
    rgb = sample_bilinear_wrapped_grid(f, u, v)
    return PerspectiveFrame(rgb=np.clip(rgb, 0.0, 1.0).astype(np.float32))


def align_clip(clip: VideoClip, traj: Trajectory, h_eq: int = DEFAULT_EQUIRECT_HEIGHT) -> VideoClip:
    """Project every frame into the shared map, with poses taken relative to frame 0.

    Frame 0 lands centered; the scene then stays put on the map as the camera
    moves, instead of the map rotating under a centered view.
    """
    if len(traj) != len(clip):
        raise ValueError(f"trajectory length {len(traj)} != clip length {len(clip)}")
    p0 = traj.poses[0]
    frames = tuple(
        project_to_equirect(clip[k], relative_pose(traj.poses[k], p0), traj.fov, h_eq)
        for k in range(len(clip))
    )
    return VideoClip(frames=frames, fps=clip.fps)


def plan_windows(t_total: int, t: int, s: int) -> WindowPlan:
    """Window layout [0,T), [T-S, 2T-S), ... covering ``t_total`` frames.

    Each window advances by T-S so the next one re-observes S context frames.
    If the stride overshoots, the final window is pulled back to end exactly at
    ``t_total`` (overlapping its predecessor by more than S).
    """
    if not (0 < s < t <= t_total):
        raise ValueError(f"need 0 < S < T <= T_total, got S={s} T={t} T_total={t_total}")
    windows = [(0, t)]
    while windows[-1][1] < t_total:
        start = windows[-1][1] - s
        end = start + t
        if end > t_total:
            start, end = t_total - t, t_total
        windows.append((start, end))
    return WindowPlan(windows=tuple(windows), window=t, context=s)
