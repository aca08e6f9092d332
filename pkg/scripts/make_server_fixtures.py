#!/usr/bin/env python3
"""Build a small demo corpus for the HTTP service and the browser viewer.

Three equirect test clips plus a fixtures.json describing the painted line
segments of the `lines` clip (used by the annotation round-trip checks):

  lines    self-consistency panorama: a perspective view with painted dark
           segments projected at the identity pose (black outside the mask)
  circle   full panorama with one painted great circle
  texture  full panorama of smooth band-limited texture, panning per frame
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from panokit.formats import canonical_dumps, save_clip, save_frame
from panokit.projection import equirect_dir_grid, project_to_equirect
from panokit.raster import EquirectFrame, PerspectiveFrame, VideoClip
from panokit.sphere import EulerPose, FieldOfView

VIEW_W, VIEW_H = 320, 240
HFOV_DEG, VFOV_DEG = 90.0, 73.74
H_EQ = 256
LINES = [
    (40.0, 60.0, 280.0, 90.0),
    (60.0, 200.0, 290.0, 140.0),
    (160.0, 20.0, 120.0, 220.0),
]


def draw_line(rgb, x1, y1, x2, y2, width=3.0, value=0.1):
    h, w = rgb.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    dx, dy = x2 - x1, y2 - y1
    t = np.clip(((xx - x1) * dx + (yy - y1) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    dist = np.hypot(xx - (x1 + t * dx), yy - (y1 + t * dy))
    rgb[dist <= width / 2] = value
    return rgb


def lined_view() -> PerspectiveFrame:
    rgb = np.full((VIEW_H, VIEW_W, 3), 0.75, dtype=np.float32)
    for seg in LINES:
        draw_line(rgb, *seg)
    return PerspectiveFrame(rgb=rgb)


def smooth_pano(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:H_EQ, 0 : 2 * H_EQ]
    rgb = np.zeros((H_EQ, 2 * H_EQ, 3))
    for c in range(3):
        for _ in range(5):
            fx, fy = rng.uniform(0.5, 4.0, 2)
            ph = rng.uniform(0, 2 * np.pi)
            rgb[..., c] += np.sin(2 * np.pi * (fx * xx / (2 * H_EQ) + fy * yy / H_EQ) + ph)
    return (rgb - rgb.min()) / (rgb.max() - rgb.min())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    fov = FieldOfView.from_degrees(HFOV_DEG, VFOV_DEG)

    view = lined_view()
    pano = project_to_equirect(view, EulerPose(), fov, h_eq=H_EQ)
    save_clip(VideoClip(frames=(pano,) * 3, fps=5.0), args.out / "lines", fov=fov)
    save_frame(view, args.out / "lines_input_view.png")

    dirs = equirect_dir_grid(2 * H_EQ, H_EQ)
    n = np.array([0.2, 0.1, 0.97])
    n /= np.linalg.norm(n)
    band = np.abs(dirs @ n) < math.sin(math.radians(1.2))
    rgb = np.full((H_EQ, 2 * H_EQ, 3), 0.8, dtype=np.float32)
    rgb[band] = 0.1
    save_clip(
        VideoClip(frames=(EquirectFrame(rgb=rgb),) * 3, fps=5.0), args.out / "circle", fov=fov
    )

    frames = tuple(
        EquirectFrame(rgb=np.roll(smooth_pano(9), 10 * k, axis=1).astype(np.float32))
        for k in range(3)
    )
    save_clip(VideoClip(frames=frames, fps=5.0), args.out / "texture", fov=fov)

    (args.out / "fixtures.json").write_text(
        canonical_dumps(
            {
                "schema": "viewer-fixtures/1",
                "view": {"width": VIEW_W, "height": VIEW_H},
                "fov": {"hfov_deg": HFOV_DEG, "vfov_deg": VFOV_DEG},
                "lines_clip": "lines",
                "input_view": "lines_input_view.png",
                "segments": [
                    {"x1": x1, "y1": y1, "x2": x2, "y2": y2} for x1, y1, x2, y2 in LINES
                ],
            }
        ),
        encoding="utf-8",
    )
    print(f"wrote fixtures to {args.out}")


if __name__ == "__main__":
    main()
