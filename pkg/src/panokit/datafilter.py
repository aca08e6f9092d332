"""Dataset curation cascade for candidate 360-degree videos.

Coarse filters run once per video on sparsely sampled frames: a like-count
gate (strictly more than the threshold passes), an equirect format check
(persistent horizontal lines in the central band betray stacked formats,
vertical lines at the left/right boundary bands betray perspective content
and posters), a left/right half-duplicate check for mislabeled 180-degree
content, and a temporal-variance static check. Survivors are split into
fixed-length clips, and fine filters run per clip: block-matching optical
flow for low motion, two-sided histogram cuts, blackness, and spatial
complexity. A text filter has no classical substitute here and exists only
as a disabled config stub.

Every verdict is recorded with its score; a rejected record names the first
failing filter in the canonical order. The whole pipeline is a pure function
of (corpus bytes, config): frame sampling randomness is seeded per video
from the config seed and the video id.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from panokit.formats import (
    ValidationError,
    canonical_dumps,
    load_clip,
    load_json_document,
)

__all__ = [
    "FilterConfig",
    "Verdict",
    "ClipRecord",
    "FormatResult",
    "HalfSimilarity",
    "MotionResult",
    "PipelineResult",
    "format_check",
    "half_similarity",
    "static_check",
    "motion_score",
    "cut_detect",
    "blackness_check",
    "split_clips",
    "run_pipeline",
    "read_corpus_manifest",
    "write_verdicts",
    "read_verdicts",
    "FILTER_ORDER",
]

SCHEMA_CORPUS = "filter-corpus/1"
SCHEMA_VERDICTS = "filter-verdicts/1"

# canonical evaluation order; first failure is reported on the record
FILTER_ORDER = (
    "likes",
    "format",
    "half_similarity",
    "static",
    "motion",
    "cut",
    "blackness",
    "complexity",
)


@dataclass(frozen=True)
class FilterConfig:
    # coarse, per video
    min_likes: int = 50  # pass needs strictly more likes than this
    sample_fps: float = 1.0  # coarse-filter sampling density
    format_line_threshold: float = 0.4  # band-line excess coverage above this -> flagged
    half_sim_threshold: float = 0.15  # lr distance below this -> duplicated halves
    static_threshold: float = 1e-4  # temporal variance below this -> static
    static_mean_subtract: bool = False  # ignore global flicker when checking motion
    # fine, per clip
    clip_length_s: float = 10.0
    motion_threshold: float = 0.5  # mean flow px/frame below this -> low motion
    cut_threshold: float = 0.6  # histogram intersection below this -> cut
    blackness_threshold: float = 0.4  # black-pixel fraction above this -> rejected
    complexity_threshold: float = 1e-3  # spatial variance below this -> rejected
    # toggles
    enable_likes: bool = True
    enable_format: bool = True
    enable_half_similarity: bool = True
    enable_static: bool = True
    enable_motion: bool = True
    enable_cut: bool = True
    enable_blackness: bool = True
    enable_complexity: bool = True
    enable_text: bool = False  # stub: the learned detector has no substitute here
    cut_aware_clips: bool = False
    downsample: int = 4  # coarse filters run on 1/downsample resolution
    seed: int = 0

    def __post_init__(self):
        if self.clip_length_s <= 0 or self.sample_fps <= 0:
            raise ValueError("clip_length_s and sample_fps must be positive")
        if not (0.0 <= self.cut_threshold <= 1.0):
            raise ValueError("cut_threshold must lie in [0, 1]")
        if not (0.0 <= self.blackness_threshold <= 1.0):
            raise ValueError("blackness_threshold must lie in [0, 1]")
        if self.enable_text:
            raise ValueError("the text filter is a stub and cannot be enabled")

    def to_doc(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_doc(cls, doc: dict) -> "FilterConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown filter config fields: {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError("verdict scores must be finite")


@dataclass(frozen=True)
class ClipRecord:
    source_id: str
    start: int  # frame range [start, end)
    end: int
    fps: float
    verdicts: dict
    accepted: bool
    first_failed: str = None

    def to_doc(self) -> dict:
        return {
            "source_id": self.source_id,
            "start": self.start,
            "end": self.end,
            "fps": self.fps,
            "accepted": self.accepted,
            "first_failed": self.first_failed,
            "verdicts": {
                name: {"passed": v.passed, "score": float(v.score)}
                for name, v in self.verdicts.items()
            },
        }


# ------------------------------------------------------------ frame helpers


def _luma(rgb: np.ndarray) -> np.ndarray:
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def _downsample(arr: np.ndarray, factor: int) -> np.ndarray:
    # the factor backs off on small frames so coarse filters keep >= 64 px
    # of detail on the short side
    arr = np.asarray(arr, dtype=np.float64)
    h, w = arr.shape[:2]
    factor = max(1, min(factor, min(h, w) // 64))
    if factor <= 1:
        return arr
    h2, w2 = h - h % factor, w - w % factor
    r = arr[:h2, :w2].reshape((h2 // factor, factor, w2 // factor, factor) + arr.shape[2:])
    return r.mean(axis=(1, 3))


# ------------------------------------------------------------ coarse filters


@dataclass(frozen=True)
class FormatResult:
    is_equirect: bool
    horizontal_score: float  # excess edge coverage of the best center-band row
    vertical_score: float  # excess edge coverage of the best boundary-band column


_EDGE_MIN = 0.1  # adjacent-pixel luminance step that counts as an edge


def _line_excess(lums, rows: slice, cols: slice, axis: int) -> float:
    """Vote for axis-aligned lines inside a band, minus the band's baseline.

    Each candidate line (a row for axis=0, a column for axis=1) accumulates
    the fraction of its span covered by strong perpendicular gradients,
    averaged over the sampled frames. Format borders stay put while content
    moves, so they stand far above the band median; dense texture lifts every
    candidate equally and cancels out.
    """
    coverages = []
    for lum in lums:
        g = np.abs(np.diff(lum, axis=axis))
        band = g[rows, cols]
        if band.shape[0] == 0 or band.shape[1] == 0:
            return 0.0
        coverages.append((band >= _EDGE_MIN).mean(axis=1 - axis))
    mean_cov = np.mean(coverages, axis=0)
    return float(mean_cov.max() - np.median(mean_cov))


def format_check(frames, config: FilterConfig = FilterConfig()) -> FormatResult:
    """Equirect sanity via persistent straight structure in suspect bands.

    Horizontal lines pinned to the central band betray up-down stacked
    formats; vertical lines pinned to the left/right boundary bands betray
    pillarboxed perspective content and posters.
    """
    frames = list(frames)
    if len(frames) < 3:
        raise ValueError("format check needs at least 3 sampled frames")
    lums = [_luma(_downsample(f, config.downsample)) for f in frames]
    h, w = lums[0].shape
    center = slice(int(0.38 * h), max(int(0.38 * h) + 2, int(0.62 * h)))
    score_h = _line_excess(lums, center, slice(0, w), axis=0)
    edge = max(2, int(0.15 * w))
    score_v = max(
        _line_excess(lums, slice(0, h), slice(0, edge), axis=1),
        _line_excess(lums, slice(0, h), slice(w - edge, w), axis=1),
    )
    flagged = (
        score_h > config.format_line_threshold or score_v > config.format_line_threshold
    )
    return FormatResult(
        is_equirect=not flagged, horizontal_score=score_h, vertical_score=score_v
    )


@dataclass(frozen=True)
class HalfSimilarity:
    lr_distance: float
    tb_distance: float


def _tile_zncc_distance(a: np.ndarray, b: np.ndarray, tile: int = 16) -> float:
    """1 - mean zero-normalized cross-correlation over square tiles."""
    h = (a.shape[0] // tile) * tile
    w = (a.shape[1] // tile) * tile
    if h == 0 or w == 0:
        h, w = a.shape[0], a.shape[1]
        tile_h, tile_w = h, w
    else:
        tile_h = tile_w = tile
    ta = a[:h, :w].reshape(h // tile_h, tile_h, w // tile_w, tile_w).transpose(0, 2, 1, 3)
    tb = b[:h, :w].reshape(h // tile_h, tile_h, w // tile_w, tile_w).transpose(0, 2, 1, 3)
    ta = ta.reshape(-1, tile_h * tile_w)
    tb = tb.reshape(-1, tile_h * tile_w)
    ma = ta.mean(axis=1, keepdims=True)
    mb = tb.mean(axis=1, keepdims=True)
    da, db = ta - ma, tb - mb
    sa = np.sqrt((da * da).mean(axis=1))
    sb = np.sqrt((db * db).mean(axis=1))
    cov = (da * db).mean(axis=1)
    flat = 1e-4
    zncc = np.where(
        (sa > flat) & (sb > flat),
        cov / np.maximum(sa * sb, 1e-12),
        # two flat tiles agree when their means agree; a flat/textured pair does not
        np.where((sa <= flat) & (sb <= flat) & (np.abs(ma - mb)[:, 0] < 0.02), 1.0, 0.0),
    )
    return max(0.0, float(1.0 - zncc.mean()))


def half_similarity(rgb, config: FilterConfig = FilterConfig()) -> HalfSimilarity:
    """Structural distance between left/right and top/bottom halves."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[0] % 2 or rgb.shape[1] % 2:
        raise ValueError("half similarity needs even frame dimensions")
    small = _luma(_downsample(rgb, config.downsample))
    h, w = small.shape
    lr = _tile_zncc_distance(small[:, : w // 2], small[:, w - w // 2 :])
    tb = _tile_zncc_distance(small[: h // 2], small[h - h // 2 :])
    return HalfSimilarity(lr_distance=lr, tb_distance=tb)


def static_check(frames, config: FilterConfig = FilterConfig()) -> float:
    """Mean per-pixel temporal variance of sampled frames (downsampled)."""
    frames = list(frames)
    if len(frames) < 2:
        raise ValueError("static check needs at least 2 frames")
    stack = np.stack(
        [_downsample(np.asarray(f, dtype=np.float64), config.downsample) for f in frames]
    )
    if config.static_mean_subtract:
        stack = stack - stack.mean(axis=(1, 2, 3), keepdims=True)
    return float(stack.var(axis=0).mean())


# -------------------------------------------------------------- fine filters


@dataclass(frozen=True)
class MotionResult:
    mean_magnitude: float  # pixels/frame over confident blocks
    confident_fraction: float

    @property
    def reliable(self) -> bool:
        return self.confident_fraction >= 0.25


_BLOCK = 16
_SEARCH = 8
_LEVELS = 3
_CONF_MIN = 0.3


def _block_flow(prev: np.ndarray, cur: np.ndarray):
    """Pyramidal exhaustive block matching; returns (flows Nx2, confidences N)."""
    pyr_prev, pyr_cur = [prev], [cur]
    for _ in range(_LEVELS - 1):
        p = pyr_prev[-1]
        if min(p.shape) // 2 < _BLOCK:
            break
        pyr_prev.append(_downsample(p, 2))
        pyr_cur.append(_downsample(pyr_cur[-1], 2))

    flows = None
    conf = None
    for level in range(len(pyr_prev) - 1, -1, -1):
        p, c = pyr_prev[level], pyr_cur[level]
        h, w = p.shape
        nby, nbx = h // _BLOCK, w // _BLOCK
        if nby == 0 or nbx == 0:
            continue
        if flows is None:
            flows = np.zeros((nby, nbx, 2))
        else:
            flows = 2.0 * _upsample_flow(flows, nby, nbx)
        conf = np.zeros((nby, nbx))
        pad = _SEARCH + _BLOCK
        c_pad = np.pad(c, pad, mode="edge")
        span = _BLOCK + 2 * _SEARCH
        for by in range(nby):
            for bx in range(nbx):
                y0, x0 = by * _BLOCK, bx * _BLOCK
                block = p[y0 : y0 + _BLOCK, x0 : x0 + _BLOCK]
                # clamp the propagated offset so the search window stays inside
                ry = y0 + int(round(flows[by, bx, 1])) + pad - _SEARCH
                rx = x0 + int(round(flows[by, bx, 0])) + pad - _SEARCH
                ry = min(max(ry, 0), c_pad.shape[0] - span)
                rx = min(max(rx, 0), c_pad.shape[1] - span)
                iy = ry - (y0 + pad - _SEARCH)
                ix = rx - (x0 + pad - _SEARCH)
                region = c_pad[ry : ry + span, rx : rx + span]
                wins = np.lib.stride_tricks.sliding_window_view(region, (_BLOCK, _BLOCK))
                ssd = ((wins - block) ** 2).sum(axis=(2, 3))
                best = int(ssd.argmin())
                dy, dx = divmod(best, ssd.shape[1])
                flows[by, bx] = (ix + dx - _SEARCH, iy + dy - _SEARCH)
                med = float(np.median(ssd))
                conf[by, bx] = 0.0 if med <= 1e-9 else 1.0 - float(ssd.min()) / med
    if flows is None:
        return np.zeros((0, 2)), np.zeros(0)
    return flows.reshape(-1, 2), conf.reshape(-1)


def _upsample_flow(flows: np.ndarray, nby: int, nbx: int) -> np.ndarray:
    ys = np.minimum(np.arange(nby) // 2, flows.shape[0] - 1)
    xs = np.minimum(np.arange(nbx) // 2, flows.shape[1] - 1)
    return flows[np.ix_(ys, xs)]


def motion_score(frames, config: FilterConfig = FilterConfig(), max_pairs: int = 8) -> MotionResult:
    """Mean block-flow magnitude over confident blocks and sampled frame pairs."""
    frames = list(frames)
    if len(frames) < 2:
        raise ValueError("motion score needs at least 2 frames")
    stride = max(1, (len(frames) - 1) // max_pairs)
    mags = []
    confident = 0
    total = 0
    for a in range(0, len(frames) - 1, stride):
        prev = _luma(np.asarray(frames[a], dtype=np.float64))
        cur = _luma(np.asarray(frames[a + 1], dtype=np.float64))
        flows, conf = _block_flow(prev, cur)
        if len(conf) == 0:
            continue
        good = conf >= _CONF_MIN
        confident += int(good.sum())
        total += len(conf)
        if good.any():
            mags.extend(np.hypot(flows[good, 0], flows[good, 1]).tolist())
    if total == 0:
        return MotionResult(mean_magnitude=0.0, confident_fraction=0.0)
    return MotionResult(
        mean_magnitude=float(np.mean(mags)) if mags else 0.0,
        confident_fraction=confident / total,
    )


def _channel_histograms(rgb: np.ndarray, bins: int = 32) -> np.ndarray:
    out = np.empty((3, bins))
    for c in range(3):
        h, _ = np.histogram(rgb[..., c], bins=bins, range=(0.0, 1.0))
        out[c] = h / max(1, rgb.shape[0] * rgb.shape[1])
    return out


def cut_detect(frames, threshold: float = 0.6) -> list[int]:
    """Indices k where a shot boundary lies between frames k-1 and k.

    A candidate needs the pair itself dissimilar AND the frames surrounding
    the pair dissimilar; a single-frame flash leaves its surroundings similar
    and is suppressed.
    """
    frames = list(frames)
    if len(frames) < 2:
        raise ValueError("cut detection needs at least 2 frames")
    hists = [_channel_histograms(np.asarray(f, dtype=np.float64)) for f in frames]

    def inter(i: int, j: int) -> float:
        return float(np.minimum(hists[i], hists[j]).sum() / 3.0)

    cuts = []
    for b in range(1, len(frames)):
        a = b - 1
        if inter(a, b) >= threshold:
            continue
        lo, hi = max(0, a - 1), min(len(frames) - 1, b + 1)
        if inter(lo, hi) < threshold:
            cuts.append(b)
    return cuts


def blackness_check(rgb, luma_threshold: float = 0.02) -> float:
    """Fraction of pixels darker than ``luma_threshold``."""
    return float((_luma(np.asarray(rgb, dtype=np.float64)) < luma_threshold).mean())


def split_clips(frame_count: int, fps: float, clip_length_s: float, cuts=None) -> list[tuple[int, int]]:
    """Non-overlapping [start, end) ranges of exactly clip_length seconds.

    Trailing remainders are discarded. With ``cuts`` given, each shot is split
    independently so no clip straddles a boundary.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    per_clip = int(round(fps * clip_length_s))
    if per_clip < 1:
        raise ValueError("clip length shorter than one frame")
    bounds = [0] + sorted(set(int(c) for c in (cuts or []))) + [frame_count]
    out = []
    for shot_start, shot_end in zip(bounds, bounds[1:]):
        n = (shot_end - shot_start) // per_clip
        for k in range(n):
            out.append((shot_start + k * per_clip, shot_start + (k + 1) * per_clip))
    return out


# ------------------------------------------------------------------ pipeline


@dataclass(frozen=True)
class PipelineResult:
    records: tuple
    config: FilterConfig

    @property
    def accepted(self) -> tuple:
        return tuple(r for r in self.records if r.accepted)

    @property
    def rejected(self) -> tuple:
        return tuple(r for r in self.records if not r.accepted)

    def summary(self) -> dict:
        by_filter: dict = {}
        for r in self.rejected:
            by_filter[r.first_failed] = by_filter.get(r.first_failed, 0) + 1
        return {
            "total": len(self.records),
            "accepted": len(self.accepted),
            "rejected": len(self.rejected),
            "rejected_by_filter": {k: by_filter[k] for k in sorted(by_filter)},
        }

    def to_doc(self) -> dict:
        return {
            "schema": SCHEMA_VERDICTS,
            "config": self.config.to_doc(),
            "summary": self.summary(),
            "clips": [r.to_doc() for r in self.records],
        }


def read_corpus_manifest(path: Path) -> list[dict]:
    """Corpus manifest: one record per candidate video."""
    path = Path(path)
    doc = load_json_document(path, SCHEMA_CORPUS)
    videos = doc.get("videos")
    if not isinstance(videos, list):
        raise ValidationError(f"{path}: field 'videos' must be a list")
    out = []
    seen = set()
    for i, rec in enumerate(videos):
        if not isinstance(rec, dict) or "id" not in rec or "manifest" not in rec:
            raise ValidationError(f"{path}: videos[{i}] needs 'id' and 'manifest'")
        if rec["id"] in seen:
            raise ValidationError(f"{path}: duplicate video id {rec['id']!r}")
        seen.add(rec["id"])
        out.append(
            {
                "id": str(rec["id"]),
                "manifest": str(rec["manifest"]),
                "like_count": rec.get("like_count"),
                "root": path.parent,
            }
        )
    return out


def _video_rng(seed: int, video_id: str) -> np.random.Generator:
    key = (seed << 32) ^ zlib.crc32(video_id.encode("utf-8"))
    return np.random.Generator(np.random.Philox(key=key & 0xFFFFFFFFFFFFFFFF))


def _sample_indices(n: int, fps: float, sample_fps: float, minimum: int = 3) -> list[int]:
    step = max(1, int(round(fps / sample_fps)))
    idx = list(range(0, n, step))
    if len(idx) < minimum:
        idx = list(range(min(n, minimum)))
    return idx


def run_pipeline(manifest_path: Path, config: FilterConfig = FilterConfig()) -> PipelineResult:
    """Filter every video in a corpus manifest; nothing is silently dropped.

    Unreadable videos are recorded as failed ``format`` verdicts with the
    error message preserved in the record order, and processing continues.
    """
    videos = read_corpus_manifest(manifest_path)
    records: list[ClipRecord] = []
    for video in sorted(videos, key=lambda v: v["id"]):
        records.extend(_process_video(video, config))
    return PipelineResult(records=tuple(records), config=config)


def _process_video(video: dict, config: FilterConfig) -> list[ClipRecord]:
    vid = video["id"]
    try:
        clip, _manifest = load_clip(Path(video["root"]) / video["manifest"])
    except Exception:  # recorded, not raised: the pipeline must continue
        return [
            ClipRecord(
                source_id=vid,
                start=0,
                end=0,
                fps=0.0,
                verdicts={"readable": Verdict(passed=False, score=0.0)},
                accepted=False,
                first_failed="readable",
            )
        ]
    frames = [np.asarray(f.rgb, dtype=np.float64) for f in clip.frames]
    fps = clip.fps
    rng = _video_rng(config.seed, vid)

    coarse: dict = {}
    if config.enable_likes:
        likes = video.get("like_count")
        if likes is None:
            coarse["likes"] = Verdict(passed=True, score=-1.0)
        else:
            coarse["likes"] = Verdict(passed=likes > config.min_likes, score=float(likes))
    sampled = [frames[i] for i in _sample_indices(len(frames), fps, config.sample_fps)]
    if config.enable_format:
        fr = format_check(sampled, config)
        coarse["format"] = Verdict(
            passed=fr.is_equirect, score=max(fr.horizontal_score, fr.vertical_score)
        )
    if config.enable_half_similarity:
        hs = [half_similarity(f, config) for f in sampled]
        lr = float(np.mean([h.lr_distance for h in hs]))
        tb = float(np.mean([h.tb_distance for h in hs]))
        coarse["half_similarity"] = Verdict(
            passed=lr >= config.half_sim_threshold and tb >= config.half_sim_threshold,
            score=min(lr, tb),
        )
    if config.enable_static:
        n_random = min(len(frames), 10)
        ridx = sorted(rng.choice(len(frames), size=n_random, replace=False).tolist())
        if len(ridx) < 2:
            ridx = list(range(len(frames)))[:2]
        var = static_check([frames[i] for i in ridx], config)
        coarse["static"] = Verdict(passed=var >= config.static_threshold, score=var)

    coarse_failed = next((n for n in FILTER_ORDER if n in coarse and not coarse[n].passed), None)
    if coarse_failed is not None:
        return [
            ClipRecord(
                source_id=vid,
                start=0,
                end=len(frames),
                fps=fps,
                verdicts=coarse,
                accepted=False,
                first_failed=coarse_failed,
            )
        ]

    cuts_all = cut_detect(frames, config.cut_threshold) if config.cut_aware_clips else None
    ranges = split_clips(len(frames), fps, config.clip_length_s, cuts=cuts_all)
    if not ranges:  # too short for a single clip; keep the bookkeeping visible
        return [
            ClipRecord(
                source_id=vid,
                start=0,
                end=len(frames),
                fps=fps,
                verdicts=coarse,
                accepted=False,
                first_failed="too_short",
            )
        ]
    records = []
    for start, end in ranges:
        sub = frames[start:end]
        verdicts = dict(coarse)
        if config.enable_motion:
            mr = motion_score(sub, config)
            verdicts["motion"] = Verdict(
                passed=mr.reliable and mr.mean_magnitude >= config.motion_threshold,
                score=mr.mean_magnitude,
            )
        if config.enable_cut:
            cuts = cut_detect(sub, config.cut_threshold)
            verdicts["cut"] = Verdict(passed=len(cuts) == 0, score=float(len(cuts)))
        if config.enable_blackness:
            frac = float(np.mean([blackness_check(f) for f in sub]))
            verdicts["blackness"] = Verdict(
                passed=frac <= config.blackness_threshold, score=frac
            )
        if config.enable_complexity:
            var = float(np.mean([f.var() for f in sub]))
            verdicts["complexity"] = Verdict(
                passed=var >= config.complexity_threshold, score=var
            )
        failed = next((n for n in FILTER_ORDER if n in verdicts and not verdicts[n].passed), None)
        records.append(
            ClipRecord(
                source_id=vid,
                start=start,
                end=end,
                fps=fps,
                verdicts=verdicts,
                accepted=failed is None,
                first_failed=failed,
            )
        )
    return records


def write_verdicts(result: PipelineResult, path: Path) -> None:
    Path(path).write_text(canonical_dumps(result.to_doc()), encoding="utf-8")


def read_verdicts(path: Path) -> dict:
    return load_json_document(Path(path), SCHEMA_VERDICTS)
