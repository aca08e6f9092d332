"""Angular and rotational math shared by every projection operation.

Conventions (fixed once, used everywhere):

* Camera/world axes: forward = +X, right = +Y, up = +Z. With this choice
  the identity pose looks at the center of the equirectangular map and
  increasing yaw moves the view toward larger map columns.
* Rotations compose as ``R_y(yaw) @ R_p(pitch) @ R_r(roll)``. Positive
  pitch lowers the latitude of the optical axis (phi = -pitch for the
  center ray); this is a property of the pitch matrix and is kept as is.
* Longitude theta = arctan2(Y, X) in [-pi, pi), latitude
  phi = arcsin(Z / |d|) in [-pi/2, pi/2]. At the poles arctan2(0, 0) is
  defined as 0.
* Angles are radians everywhere inside the library. Degrees exist only at
  CLI/HTTP boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "EulerPose",
    "FieldOfView",
    "NdcCoord",
    "Direction3",
    "SphericalCoord",
    "EquirectCoord",
    "wrap_angle",
    "pixel_to_ndc",
    "ndc_to_camera_ray",
    "roll_matrix",
    "pitch_matrix",
    "yaw_matrix",
    "rotation_from_pose",
    "dir_to_spherical",
    "spherical_to_equirect",
    "equirect_to_dir",
    "decompose_rotation",
    "relative_pose",
]

_TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Wrap an angle to [-pi, pi). Values already in range pass through bit-exact."""
    if -math.pi <= x < math.pi:
        return float(x)
    return float((x + math.pi) % _TWO_PI - math.pi)


@dataclass(frozen=True)
class EulerPose:
    """Roll/pitch/yaw in radians. Angles are wrapped to [-pi, pi) on construction."""

    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        for name in ("roll", "pitch", "yaw"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"pose {name} must be finite, got {v!r}")
            object.__setattr__(self, name, wrap_angle(float(v)))

    @classmethod
    def identity(cls) -> "EulerPose":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class FieldOfView:
    """Horizontal/vertical field of view in radians, each in (0, pi) exclusive."""

    horizontal: float
    vertical: float

    def __post_init__(self):
        for name in ("horizontal", "vertical"):
            v = getattr(self, name)
            if not (0.0 < v < math.pi):
                raise ValueError(f"{name} FoV must lie in (0, pi), got {v!r}")

    @classmethod
    def from_degrees(cls, horizontal: float, vertical: float) -> "FieldOfView":
        return cls(math.radians(horizontal), math.radians(vertical))


class NdcCoord(NamedTuple):
    x_ndc: float
    y_ndc: float


class Direction3(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


class SphericalCoord(NamedTuple):
    theta: float
    phi: float


class EquirectCoord(NamedTuple):
    u_eq: float
    v_eq: float


def pixel_to_ndc(u: float, v: float, width: int, height: int) -> NdcCoord:
    """Rescale pixel coordinates to [-1, 1]: x = 2u/W - 1, y = 2v/H - 1."""
    if width < 1 or height < 1:
        raise ValueError(f"image dimensions must be positive, got {width}x{height}")
    return NdcCoord(2.0 * u / width - 1.0, 2.0 * v / height - 1.0)


def ndc_to_camera_ray(n: NdcCoord, fov: FieldOfView) -> Direction3:
    """Unit ray through an NDC point, in the camera frame (+X fwd, +Y right, +Z up).

    NDC y grows downward (image rows), so it enters the up axis negated.
    """
    d = np.array(
        [
            1.0,
            n[0] * math.tan(fov.horizontal / 2.0),
            -n[1] * math.tan(fov.vertical / 2.0),
        ]
    )
    d /= np.linalg.norm(d)
    return Direction3(*d)


def roll_matrix(r: float) -> np.ndarray:
    c, s = math.cos(r), math.sin(r)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def pitch_matrix(p: float) -> np.ndarray:
    c, s = math.cos(p), math.sin(p)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def yaw_matrix(y: float) -> np.ndarray:
    c, s = math.cos(y), math.sin(y)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_from_pose(pose: EulerPose) -> np.ndarray:
    """Camera-to-world rotation ``R_y(yaw) @ R_p(pitch) @ R_r(roll)``."""
    return yaw_matrix(pose.yaw) @ pitch_matrix(pose.pitch) @ roll_matrix(pose.roll)


def dir_to_spherical(d) -> SphericalCoord:
    """(theta, phi) of a direction; theta = arctan2(y, x), phi = arcsin(z/|d|)."""
    x, y, z = float(d[0]), float(d[1]), float(d[2])
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        raise ValueError("cannot convert the zero vector to spherical coordinates")
    return SphericalCoord(math.atan2(y, x), math.asin(max(-1.0, min(1.0, z / norm))))


def spherical_to_equirect(s: SphericalCoord, w_eq: int, h_eq: int) -> EquirectCoord:
    """Map (theta, phi) to continuous equirect pixel coordinates.

    u = W*(theta+pi)/(2pi), v = H*(pi/2 - phi)/pi. Requires the 2:1 aspect.
    """
    _check_equirect_dims(w_eq, h_eq)
    theta, phi = s
    return EquirectCoord(
        w_eq * (theta + math.pi) / _TWO_PI,
        h_eq * (math.pi / 2.0 - phi) / math.pi,
    )


def equirect_to_dir(c: EquirectCoord, w_eq: int, h_eq: int) -> Direction3:
    """Exact inverse of :func:`spherical_to_equirect` composed with the ray map."""
    _check_equirect_dims(w_eq, h_eq)
    u, v = float(c[0]), float(c[1])
    if not (0.0 <= u < w_eq) or not (0.0 <= v <= h_eq):
        raise ValueError(f"equirect coordinate ({u}, {v}) outside {w_eq}x{h_eq} map")
    theta = _TWO_PI * u / w_eq - math.pi
    phi = math.pi / 2.0 - math.pi * v / h_eq
    cphi = math.cos(phi)
    return Direction3(cphi * math.cos(theta), cphi * math.sin(theta), math.sin(phi))


def _check_equirect_dims(w_eq: int, h_eq: int) -> None:
    if h_eq < 1 or w_eq != 2 * h_eq:
        raise ValueError(f"equirect map must be 2:1 (W=2H), got {w_eq}x{h_eq}")


def decompose_rotation(R: np.ndarray) -> tuple[EulerPose, bool]:
    """Factor a rotation matrix back into (yaw, pitch, roll) under our composition order.

    Returns ``(pose, degenerate)``. At gimbal lock (|pitch| = pi/2) the
    factorization is not unique; roll is set to 0, the remaining rotation is
    absorbed into yaw, and ``degenerate`` is True.
    """
    R = np.asarray(R, dtype=np.float64)
    sp = -R[2, 0]
    sp = max(-1.0, min(1.0, float(sp)))
    pitch = math.asin(sp)
    # cos(pitch) ~ 0: yaw and roll axes align.
    if 1.0 - abs(sp) < 1e-12:
        yaw = math.atan2(-R[0, 1], R[1, 1])
        return EulerPose(0.0, pitch, yaw), True
    roll = math.atan2(R[2, 1], R[2, 2])
    yaw = math.atan2(R[1, 0], R[0, 0])
    return EulerPose(roll, pitch, yaw), False


def relative_pose(p_k: EulerPose, p_0: EulerPose) -> EulerPose:
    """Euler angles of frame k expressed relative to frame 0.

    Satisfies ``rotation_from_pose(result) == R(p_0).T @ R(p_k)`` up to float
    rounding. Use :func:`decompose_rotation` directly if the gimbal-lock flag
    is needed.
    """
    rel = rotation_from_pose(p_0).T @ rotation_from_pose(p_k)
    pose, _ = decompose_rotation(rel)
    return pose
