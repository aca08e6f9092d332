"""Deterministic straight-line detection via an accumulator-vote transform.

The pipeline is classical: luminance, light Gaussian smoothing, Sobel
gradient magnitude, thresholded edge map, then (theta, rho) voting at
1-pixel rho resolution. Peaks are extracted iteratively: take the strongest
cell, emit the dense edge runs along that line, remove the supporting pixels
from the vote pool, and repeat until no cell clears the threshold. Removing
supporters kills the echo peaks a thick painted line otherwise produces, and
the output order (extraction order) is deterministic, which keeps metric
runs reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from panokit.lines import LineSegment
from panokit.raster import PerspectiveFrame

__all__ = ["HoughParams", "hough_detect", "luminance"]

_REFINE_DIST = 6.0  # band around a peak used for least-squares refinement
_SEG_DIST = 4.5  # pixel-to-refit-line distance for segment membership
_REMOVE_DIST = 6.0  # supporters removed from the pool after a peak
_MAX_GAP = 4.0  # run split threshold along the line
_MIN_DENSITY = 0.5  # edge pixels per unit length within a run
_MAX_PEAKS = 64  # hard stop; honest frames produce a handful
_CONTRAST = 3.0  # peak must beat the uniform-spread vote baseline by this factor


@dataclass(frozen=True)
class HoughParams:
    edge_threshold: float = 0.15  # gradient magnitude on [0, 1] luminance
    angular_bins: int = 180
    accumulator_threshold: int = None  # None: max(20, min(W, H) // 4)
    min_segment_length: float = 25.0

    def __post_init__(self):
        if not (0.0 < self.edge_threshold < 1.0):
            raise ValueError("edge_threshold must lie in (0, 1)")
        if self.angular_bins < 4:
            raise ValueError("need at least 4 angular bins")
        if self.min_segment_length <= 0:
            raise ValueError("min_segment_length must be positive")


def luminance(rgb: np.ndarray) -> np.ndarray:
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


_BLUR_SIGMA = 1.5  # suppresses resampling ridges; painted lines survive


def _edge_map(frame: PerspectiveFrame, threshold: float) -> np.ndarray:
    lum = ndimage.gaussian_filter(luminance(frame.rgb.astype(np.float64)), sigma=_BLUR_SIGMA)
    gx = ndimage.sobel(lum, axis=1) / 4.0  # unit step edge -> magnitude ~1
    gy = ndimage.sobel(lum, axis=0) / 4.0
    return np.hypot(gx, gy) >= threshold


def hough_detect(frame: PerspectiveFrame, params: HoughParams = HoughParams()) -> list[LineSegment]:
    """Detect straight segments; may return an empty list."""
    h, w = frame.height, frame.width
    acc_threshold = params.accumulator_threshold
    if acc_threshold is None:
        acc_threshold = max(20, min(w, h) // 4)

    edges = _edge_map(frame, params.edge_threshold)
    ys, xs = np.nonzero(edges)
    if len(xs) == 0:
        return []

    nbins = params.angular_bins
    thetas = np.pi * np.arange(nbins) / nbins
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    diag = int(math.ceil(math.hypot(w, h)))
    n_rho = 2 * diag + 1

    pts = np.stack([xs, ys], axis=1).astype(np.float64)
    rho_idx = np.rint(pts[:, 0, None] * cos_t[None, :] + pts[:, 1, None] * sin_t[None, :]).astype(np.int64) + diag
    flat = rho_idx * nbins + np.arange(nbins)[None, :]
    acc = np.bincount(flat.ravel(), minlength=n_rho * nbins)

    alive = np.ones(len(pts), dtype=bool)
    segments: list[LineSegment] = []
    for _ in range(_MAX_PEAKS):
        # dense edge fields (noise, texture) fill cells to ~alive/(2*diag)
        # votes; a real line must stand well above that baseline
        baseline = alive.sum() / (2.0 * diag)
        best = int(acc.argmax())
        if acc[best] < max(acc_threshold, _CONTRAST * baseline):
            break
        rho_val = float(best // nbins - diag)
        t_idx = int(best % nbins)
        ct, st = cos_t[t_idx], sin_t[t_idx]

        # a painted line contributes one edge band per side; refit through the
        # whole structure so the detection centers on it (two passes, since
        # the voted cell may sit on one side band)
        for _ in range(2):
            dist = np.abs(pts[:, 0] * ct + pts[:, 1] * st - rho_val)
            band = pts[dist <= _REFINE_DIST]
            if len(band) < 2:
                break
            refined = _fit_line(band)
            if refined is None:
                break
            ct, st, rho_val = refined
        dist = np.abs(pts[:, 0] * ct + pts[:, 1] * st - rho_val)

        # runs are built over all edge pixels so a line consumed at a crossing
        # by an earlier peak still comes out in one piece
        members = dist <= _SEG_DIST
        segments.extend(
            _runs_to_segments(pts[members], ct, st, rho_val, params.min_segment_length)
        )

        removed = alive & (dist <= _REMOVE_DIST)
        if not removed.any():  # defensive: the peak must have supporters
            acc[best] = 0
            continue
        np.subtract.at(acc, flat[removed].ravel(), 1)
        alive &= ~removed
    return segments


def _fit_line(band: np.ndarray):
    """Total-least-squares line through points: returns (cos, sin, rho) or None."""
    centroid = band.mean(axis=0)
    centered = band - centroid
    cov = centered.T @ centered
    evals, evecs = np.linalg.eigh(cov)
    direction = evecs[:, int(np.argmax(evals))]
    if evals.max() <= 0:
        return None
    ct, st = -direction[1], direction[0]  # unit normal
    return float(ct), float(st), float(ct * centroid[0] + st * centroid[1])


def _runs_to_segments(near: np.ndarray, ct: float, st: float, rho_val: float, min_len: float):
    if len(near) < 2:
        return []
    # parametrize along the line direction (-sin, cos)
    t = near[:, 0] * (-st) + near[:, 1] * ct
    t_sorted = np.sort(t)
    breaks = np.nonzero(np.diff(t_sorted) > _MAX_GAP)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [len(t_sorted) - 1]])
    foot = np.array([ct * rho_val, st * rho_val])
    d = np.array([-st, ct])
    out = []
    for s_i, e_i in zip(starts, ends):
        span = t_sorted[e_i] - t_sorted[s_i]
        if span < min_len:
            continue
        if (e_i - s_i + 1) / (span + 1.0) < _MIN_DENSITY:
            continue
        p1 = foot + t_sorted[s_i] * d
        p2 = foot + t_sorted[e_i] * d
        out.append(LineSegment(p1[0], p1[1], p2[0], p2[1]))
    return out
