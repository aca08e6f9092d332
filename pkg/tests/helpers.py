"""Shared synthetic-image builders for the test suite."""

import math

import numpy as np

from panokit.raster import EquirectFrame, PerspectiveFrame


def draw_line(rgb, x1, y1, x2, y2, width=3.0, value=1.0):
    """Paint a constant-width segment into an HxWx3 array, in place."""
    h, w = rgb.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    dx, dy = x2 - x1, y2 - y1
    length_sq = dx * dx + dy * dy
    t = np.clip(((xx - x1) * dx + (yy - y1) * dy) / length_sq, 0.0, 1.0)
    dist = np.hypot(xx - (x1 + t * dx), yy - (y1 + t * dy))
    rgb[dist <= width / 2] = value
    return rgb


def smooth_frame(h=64, w=64, seed=0):
    """Band-limited image that survives bilinear round trips above 30 dB."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w]
    rgb = np.zeros((h, w, 3))
    for c in range(3):
        for _ in range(4):
            fx, fy = rng.uniform(0.5, 2.5, 2)
            ph = rng.uniform(0, 2 * np.pi)
            rgb[..., c] += np.sin(2 * np.pi * (fx * xx / w + fy * yy / h) + ph)
    rgb = (rgb - rgb.min()) / (rgb.max() - rgb.min())
    return PerspectiveFrame(rgb=rgb.astype(np.float32))


def lined_view(w=320, h=240, lines=None, background=0.75, value=0.1, width=3.0):
    """Gray perspective view with painted dark segments; returns (frame, segments)."""
    if lines is None:
        lines = [
            (40.0, 60.0, 280.0, 90.0),
            (60.0, 200.0, 290.0, 140.0),
            (160.0, 20.0, 120.0, 220.0),
        ]
    rgb = np.full((h, w, 3), background, dtype=np.float32)
    for x1, y1, x2, y2 in lines:
        draw_line(rgb, x1, y1, x2, y2, width=width, value=value)
    return PerspectiveFrame(rgb=rgb), lines


def noise_pano(h_eq=128, seed=0):
    rng = np.random.default_rng(seed)
    return EquirectFrame(rgb=rng.uniform(size=(h_eq, 2 * h_eq, 3)).astype(np.float32))


def great_circle_pano(h_eq=256, normal=(0.2, 0.1, 0.97), half_width_deg=1.2,
                      background=0.8, value=0.1):
    """Full panorama with one painted great circle (plane through the center)."""
    from panokit.projection import equirect_dir_grid

    n = np.asarray(normal, dtype=np.float64)
    n = n / np.linalg.norm(n)
    dirs = equirect_dir_grid(2 * h_eq, h_eq)
    band = np.abs(dirs @ n) < math.sin(math.radians(half_width_deg))
    rgb = np.full((h_eq, 2 * h_eq, 3), background, dtype=np.float32)
    rgb[band] = value
    return EquirectFrame(rgb=rgb), n


def psnr(a, b):
    mse = float(np.mean((np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)) ** 2))
    return 100.0 if mse < 1e-10 else 10.0 * math.log10(1.0 / mse)
