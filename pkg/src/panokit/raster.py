"""Frame buffers and wrap-aware sampling.

Frames store linear [0, 1] float32 channels; 8-bit conversion happens only at
file I/O. Arrays are frozen after construction so frames can be shared across
threads without copying. Sample location (u, v) addresses the texel grid with
centers at integer coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PerspectiveFrame",
    "EquirectFrame",
    "VideoClip",
    "sample_bilinear_wrapped",
    "sample_bilinear_wrapped_grid",
    "circular_shift",
    "rotate_180",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _check_rgb(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float32)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"rgb must have shape (H, W, 3), got {rgb.shape}")
    if rgb.size and (rgb.min() < 0.0 or rgb.max() > 1.0):
        raise ValueError("rgb values must lie in [0, 1]")
    return rgb


@dataclass(frozen=True)
class PerspectiveFrame:
    """Pinhole view raster. Intrinsics are implied by the FoV it was made with."""

    rgb: np.ndarray

    def __post_init__(self):
        rgb = _check_rgb(self.rgb)
        if rgb.shape[0] < 8 or rgb.shape[1] < 8:
            raise ValueError(f"perspective frames must be at least 8x8, got {rgb.shape}")
        object.__setattr__(self, "rgb", _freeze(rgb))

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]


@dataclass(frozen=True)
class EquirectFrame:
    """2:1 panoramic raster with a validity mask (True = observed)."""

    rgb: np.ndarray
    mask: np.ndarray = None

    def __post_init__(self):
        rgb = _check_rgb(self.rgb)
        h, w = rgb.shape[:2]
        if w != 2 * h:
            raise ValueError(f"equirect frames must be 2:1 (W=2H), got {h}x{w}")
        mask = self.mask
        if mask is None:
            mask = np.ones((h, w), dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (h, w):
            raise ValueError(f"mask shape {mask.shape} does not match rgb {rgb.shape[:2]}")
        object.__setattr__(self, "rgb", _freeze(rgb))
        object.__setattr__(self, "mask", _freeze(mask))

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]


@dataclass(frozen=True)
class VideoClip:
    """Ordered frames of one raster type sharing dimensions."""

    frames: tuple
    fps: float = 25.0

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("a clip needs at least one frame")
        if len({(f.height, f.width, type(f)) for f in frames}) != 1:
            raise ValueError("all frames in a clip must share type and dimensions")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, k):
        return self.frames[k]


def sample_bilinear_wrapped_grid(
    frame: EquirectFrame, u: np.ndarray, v: np.ndarray
) -> np.ndarray:
    """Bilinear sample of an equirect frame at continuous (u, v) arrays.

    Columns wrap horizontally (col W-1 neighbors col 0); rows clamp at the
    poles, since the equirect format has no vertical continuity.
    """
    h, w = frame.height, frame.width
    u = np.asarray(u, dtype=np.float64) % w
    v = np.clip(np.asarray(v, dtype=np.float64), 0.0, h - 1)
    u0 = np.floor(u).astype(np.intp)
    v0 = np.floor(v).astype(np.intp)
    fu = (u - u0)[..., None]
    fv = (v - v0)[..., None]
    u1 = (u0 + 1) % w
    v1 = np.minimum(v0 + 1, h - 1)
    rgb = frame.rgb
    top = rgb[v0, u0] * (1.0 - fu) + rgb[v0, u1] * fu
    bot = rgb[v1, u0] * (1.0 - fu) + rgb[v1, u1] * fu
    return top * (1.0 - fv) + bot * fv


def sample_bilinear_wrapped(frame: EquirectFrame, coord) -> np.ndarray:
    """Single-point version of :func:`sample_bilinear_wrapped_grid`."""
    u, v = float(coord[0]), float(coord[1])
    if not (0.0 <= u < frame.width) or not (0.0 <= v <= frame.height):
        raise ValueError(f"sample coordinate ({u}, {v}) outside map")
    return sample_bilinear_wrapped_grid(frame, np.array(u), np.array(v))


def circular_shift(frame: EquirectFrame, offset: int) -> EquirectFrame:
    """Rotate columns right by ``offset`` (mod W); mask moves identically."""
    offset = int(offset) % frame.width
    return EquirectFrame(
        rgb=np.roll(frame.rgb, offset, axis=1),
        mask=np.roll(frame.mask, offset, axis=1),
    )


def rotate_180(frame: EquirectFrame) -> EquirectFrame:
    """Half-turn about the vertical axis: a circular shift by W/2."""
    if frame.width % 2 != 0:
        raise ValueError("180-degree rotation needs an even width")
    return circular_shift(frame, frame.width // 2)
