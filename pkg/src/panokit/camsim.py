"""Synthetic camera trajectories: linear drift + oscillation + white noise.

Per frame k the three angles are

    roll(k)  = N(0, eta_r) + a_r * sin(omega*k + tau_r)
    pitch(k) = N(0, eta_p) + a_p * sin(omega*k + tau_p) + d_p * k
    yaw(k)   = N(0, eta_y) + a_y * sin(omega*k + tau_y) + d_y * k + phi_0

Roll has no drift term and yaw is the only angle with a constant offset; that
asymmetry is deliberate and kept exactly. Noise is per-frame white Gaussian
with the given standard deviations; no smoothing is applied.

Randomness comes from numpy's Philox bit generator, a counter-based 64-bit
generator whose streams are reproducible across platforms and numpy versions.
Draw order is fixed: roll noise for all frames, then pitch, then yaw; field
sampling draws in the declared field order of ``MotionParams``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from panokit.projection import Trajectory
from panokit.sphere import EulerPose, FieldOfView

__all__ = [
    "MotionParams",
    "ParamRanges",
    "simulate_trajectory",
    "simulate_clip_trajectory",
    "sample_params",
    "FOV_MIN_DEG",
    "FOV_MAX_DEG",
]

FOV_MIN_DEG = 30.0
FOV_MAX_DEG = 120.0


@dataclass(frozen=True)
class MotionParams:
    """Parameter set for one simulated trajectory. Angles in radians."""

    omega: float = 0.0
    tau_r: float = 0.0
    tau_p: float = 0.0
    tau_y: float = 0.0
    a_r: float = 0.0
    a_p: float = 0.0
    a_y: float = 0.0
    eta_r: float = 0.0
    eta_p: float = 0.0
    eta_y: float = 0.0
    d_p: float = 0.0
    d_y: float = 0.0
    phi_0: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        for name in ("a_r", "a_p", "a_y", "eta_r", "eta_p", "eta_y"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


_RANGE_FIELDS = (
    "omega", "tau_r", "tau_p", "tau_y",
    "a_r", "a_p", "a_y",
    "eta_r", "eta_p", "eta_y",
    "d_p", "d_y", "phi_0",
)

_DEG = math.pi / 180.0


@dataclass(frozen=True)
class ParamRanges:
    """Closed sampling intervals per parameter, plus the FoV interval (radians).

    Defaults keep 25-frame clips inside a plausible handheld motion envelope:
    slow oscillation, sub-degree jitter, mild pitch drift, up to 1 deg/frame
    of panning.
    """

    omega: tuple = (0.02, 0.2)
    tau_r: tuple = (0.0, 2 * math.pi)
    tau_p: tuple = (0.0, 2 * math.pi)
    tau_y: tuple = (0.0, 2 * math.pi)
    a_r: tuple = (0.0, 5 * _DEG)
    a_p: tuple = (0.0, 5 * _DEG)
    a_y: tuple = (0.0, 5 * _DEG)
    eta_r: tuple = (0.0, 0.5 * _DEG)
    eta_p: tuple = (0.0, 0.5 * _DEG)
    eta_y: tuple = (0.0, 0.5 * _DEG)
    d_p: tuple = (-0.2 * _DEG, 0.2 * _DEG)
    d_y: tuple = (-1.0 * _DEG, 1.0 * _DEG)
    phi_0: tuple = (-math.pi, math.pi)
    fov: tuple = (FOV_MIN_DEG * _DEG, FOV_MAX_DEG * _DEG)

    def __post_init__(self):
        for f in fields(self):
            lo, hi = getattr(self, f.name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"range {f.name} must be a finite nonempty interval")
        for name in ("a_r", "a_p", "a_y", "eta_r", "eta_p", "eta_y"):
            if getattr(self, name)[0] < 0:
                raise ValueError(f"range {name} must be nonnegative")
        if self.omega[0] < 0:
            raise ValueError("omega range must be nonnegative")
        lo, hi = self.fov
        if lo < FOV_MIN_DEG * _DEG - 1e-12 or hi > FOV_MAX_DEG * _DEG + 1e-12:
            raise ValueError("fov range must stay within [30, 120] degrees")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))


def simulate_trajectory(p: MotionParams, t: int) -> list[EulerPose]:
    """Poses for frames 0..t-1. Identical inputs give identical output."""
    if t < 1:
        raise ValueError(f"need at least one frame, got {t}")
    rng = _rng(p.seed)
    k = np.arange(t, dtype=np.float64)
    noise_r = p.eta_r * rng.standard_normal(t)
    noise_p = p.eta_p * rng.standard_normal(t)
    noise_y = p.eta_y * rng.standard_normal(t)
    roll = noise_r + p.a_r * np.sin(p.omega * k + p.tau_r)
    pitch = noise_p + p.a_p * np.sin(p.omega * k + p.tau_p) + p.d_p * k
    yaw = noise_y + p.a_y * np.sin(p.omega * k + p.tau_y) + p.d_y * k + p.phi_0
    return [EulerPose(float(r), float(pp), float(y)) for r, pp, y in zip(roll, pitch, yaw)]


def simulate_clip_trajectory(p: MotionParams, fov: FieldOfView, t: int) -> Trajectory:
    return Trajectory(poses=tuple(simulate_trajectory(p, t)), fov=fov)


def sample_params(ranges: ParamRanges, seed: int) -> tuple[MotionParams, FieldOfView]:
    """Draw one parameter set and FoV uniformly from the given intervals.

    The trajectory seed is itself drawn from the stream, so a single sampling
    seed pins the whole downstream clip.
    """
    rng = _rng(seed)
    values = {}
    for name in _RANGE_FIELDS:
        lo, hi = getattr(ranges, name)
        values[name] = float(rng.uniform(lo, hi))
    lo, hi = ranges.fov
    fov = FieldOfView(float(rng.uniform(lo, hi)), float(rng.uniform(lo, hi)))
    values["seed"] = int(rng.integers(0, 2**63 - 1))
    return MotionParams(**values), fov
