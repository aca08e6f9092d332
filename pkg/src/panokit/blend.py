"""Seam-blended decoding weights and the latitude loss-weight map.

A panorama generated at a 180-degree yaw offset carries the same content but
puts its seam artifacts at the opposite meridian. Blending the pair with the
triangular column profile h(x) = 1 - 2|x/W - 1/2| hides both seams: columns
near the map boundary take the rotated partner, columns near the center keep
the original.

The latitude weight lambda(h) = (1/2 - |1/2 - h|)^2 + delta down-weights pole
rows, whose pixels are disproportionally enlarged by the equirect format.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from panokit.raster import EquirectFrame, rotate_180

__all__ = [
    "SeamWeightProfile",
    "LatitudeWeightMap",
    "seam_weight",
    "seam_profile",
    "blend_pair",
    "latitude_weight",
    "latitude_weights",
    "DEFAULT_DELTA",
]

# keeps pole rows contributing at 1/25 of the equator weight
DEFAULT_DELTA = 0.01


def seam_weight(i: int, w: int) -> float:
    """Column weight h(i) = 1 - 2|i/W - 1/2|; 0 at the seam, 1 at the center."""
    if not (0 <= i < w):
        raise ValueError(f"column {i} outside [0, {w})")
    return 1.0 - 2.0 * abs(i / w - 0.5)


@dataclass(frozen=True)
class SeamWeightProfile:
    width: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def seam_profile(w: int) -> SeamWeightProfile:
    cols = np.arange(w, dtype=np.float64)
    return SeamWeightProfile(width=w, weights=1.0 - 2.0 * np.abs(cols / w - 0.5))


def blend_pair(y: EquirectFrame, y_rot: EquirectFrame) -> EquirectFrame:
    """Blend a frame with its 180-degree-offset partner.

    ``y_rot`` is rotated back by half a width first, so both operands live in
    the 0-degree frame and the weights mix co-located content. Computed as
    aligned + h * (y - aligned), which returns ``y`` bit-exactly when the pair
    is consistent. Masks are OR-combined.
    """
    if (y.height, y.width) != (y_rot.height, y_rot.width):
        raise ValueError(
            f"blend operands must share dimensions, got {y.height}x{y.width} "
            f"and {y_rot.height}x{y_rot.width}"
        )
    aligned = rotate_180(y_rot)
    h = seam_profile(y.width).weights[None, :, None]
    a64 = aligned.rgb.astype(np.float64)
    out = a64 + h * (y.rgb.astype(np.float64) - a64)
    return EquirectFrame(
        rgb=np.clip(out, 0.0, 1.0).astype(np.float32),
        mask=y.mask | aligned.mask,
    )


def latitude_weight(h, delta: float = DEFAULT_DELTA):
    """lambda(h) = (1/2 - |1/2 - h|)^2 + delta for relative height h in [0, 1]."""
    h = np.asarray(h, dtype=np.float64)
    return (0.5 - np.abs(0.5 - h)) ** 2 + delta


@dataclass(frozen=True)
class LatitudeWeightMap:
    height: int
    delta: float
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.height,):
            raise ValueError(f"expected {self.height} row weights, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def latitude_weights(h_eq: int, delta: float = DEFAULT_DELTA) -> LatitudeWeightMap:
    """Per-row weights evaluated at row centers h = (r + 0.5) / H."""
    if h_eq < 2:
        raise ValueError(f"need at least 2 rows, got {h_eq}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    # |1/2 - (r+1/2)/H| = |H - 2r - 1| / (2H); the integer numerator makes
    # mirror rows bit-identical, which the float form does not guarantee
    r = np.arange(h_eq)
    dist = np.abs(h_eq - 2 * r - 1) / (2.0 * h_eq)
    return LatitudeWeightMap(height=h_eq, delta=delta, weights=(0.5 - dist) ** 2 + delta)
