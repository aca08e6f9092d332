#!/usr/bin/env python3
"""Regenerate the synthetic filter-calibration corpus committed under
tests/data/filter_corpus/.

Six small videos, one per failure mode plus one clean survivor:

  v1_clean      panning texture, passes everything (like_count 120)
  v2_lowlikes   clean content but exactly 50 likes (the gate needs >50)
  v3_stacked    up-down stacked halves: hard horizontal border at mid-height
  v4_mirrored   right half duplicates the left half (mislabeled 180 content)
  v5_static     one frame repeated for the whole duration
  v6_blackness  mostly black frames with a thin moving texture band

Deterministic: fixed seeds, quantized textures (also keeps the PNGs small).
"""

import argparse
from pathlib import Path

import numpy as np
from scipy import ndimage

from panokit.formats import canonical_dumps, save_clip
from panokit.raster import EquirectFrame, VideoClip

FPS = 4.0
SECONDS = 25  # two 10-second clips per video, 5 s tail discarded
H, W = 64, 128


def texture(h, w, seed, smooth=2.0, lo=0.0, hi=1.0):
    rng = np.random.default_rng(seed)
    t = ndimage.gaussian_filter(rng.uniform(size=(h, w, 3)), (smooth, smooth, 0))
    t = (t - t.min()) / (t.max() - t.min()) * (hi - lo) + lo
    return np.rint(t * 15) / 15  # 16 levels: compresses well, plenty of contrast


def frames_clean(seed):
    base = texture(H, W, seed)
    return [np.roll(base, 2 * k, axis=1) for k in range(int(FPS * SECONDS))]


def frames_stacked(seed):
    top = texture(H // 2, W, seed + 1, lo=0.6, hi=1.0)
    bottom = texture(H // 2, W, seed + 2, lo=0.0, hi=0.45)
    out = []
    for k in range(int(FPS * SECONDS)):
        f = np.empty((H, W, 3))
        f[: H // 2] = np.roll(top, 2 * k, axis=1)
        f[H // 2 :] = np.roll(bottom, 2 * k, axis=1)
        out.append(f)
    return out


def frames_mirrored(seed):
    half = texture(H, W // 2, seed)
    out = []
    for k in range(int(FPS * SECONDS)):
        rolled = np.roll(half, 2 * k, axis=1)
        out.append(np.concatenate([rolled, rolled], axis=1))
    return out


def frames_static(seed):
    base = texture(H, W, seed)
    return [base] * int(FPS * SECONDS)


def frames_blackness(seed):
    band = texture(24, W, seed)
    out = []
    for k in range(int(FPS * SECONDS)):
        f = np.zeros((H, W, 3))
        f[:24] = np.roll(band, 2 * k, axis=1)
        out.append(f)
    return out


VIDEOS = [
    ("v1_clean", frames_clean, 10, 120),
    ("v2_lowlikes", frames_clean, 20, 50),
    ("v3_stacked", frames_stacked, 30, 80),
    ("v4_mirrored", frames_mirrored, 40, 90),
    ("v5_static", frames_static, 50, 70),
    ("v6_blackness", frames_blackness, 60, 99),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "tests" / "data" / "filter_corpus",
    )
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    entries = []
    for name, maker, seed, likes in VIDEOS:
        frames = tuple(
            EquirectFrame(rgb=np.clip(f, 0, 1).astype(np.float32)) for f in maker(seed)
        )
        save_clip(VideoClip(frames=frames, fps=FPS), args.out / name)
        entries.append({"id": name, "manifest": f"{name}/manifest.json", "like_count": likes})
        print(f"{name}: {len(frames)} frames, {likes} likes")

    doc = {"schema": "filter-corpus/1", "videos": entries}
    (args.out / "corpus.json").write_text(canonical_dumps(doc), encoding="utf-8")
    print(f"wrote {args.out / 'corpus.json'}")


if __name__ == "__main__":
    main()
