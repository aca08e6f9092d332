"""On-disk formats: PNG frame sequences and canonical JSON documents.

Canonical form: fixed key order (construction order below), two-space
indent, floats printed at 9 significant digits, a single trailing newline.
Writing the result of a read reproduces the bytes exactly, so documents are
golden-file testable. Readers reject unknown schema versions and trailing
garbage, and report the first offending location.

Frames are stored one PNG per frame with zero-padded indices. Perspective
frames are RGB; equirect frames are RGBA with the validity mask in alpha.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from panokit.lines import LineSegment
from panokit.projection import Trajectory
from panokit.raster import EquirectFrame, PerspectiveFrame, VideoClip
from panokit.sphere import EulerPose, FieldOfView

__all__ = [
    "FormatError",
    "ParseError",
    "ValidationError",
    "ClipManifest",
    "LabeledSegment",
    "AnnotationFile",
    "canonical_dumps",
    "load_json_document",
    "read_clip_manifest",
    "write_clip_manifest",
    "read_trajectory",
    "read_trajectory_document",
    "write_trajectory",
    "read_annotations",
    "write_annotations",
    "annotations_to_doc",
    "annotations_from_doc",
    "save_frame",
    "load_perspective_frame",
    "load_equirect_frame",
    "load_clip",
    "save_clip",
]

SCHEMA_CLIP_MANIFEST = "clip-manifest/1"
SCHEMA_TRAJECTORY = "trajectory/1"
SCHEMA_ANNOTATIONS = "annotations/1"


class FormatError(Exception):
    pass


class ParseError(FormatError):
    """Document is not well-formed."""


class ValidationError(FormatError):
    """Document parses but violates the schema or references bad data."""


def _round9(x: float) -> float:
    return float(f"{x:.9g}")


def _canonical(value):
    if isinstance(value, bool) or isinstance(value, int) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"non-finite number {value!r} cannot be serialized")
        return _round9(value)
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    raise TypeError(f"cannot canonicalize {type(value).__name__}")


def canonical_dumps(doc: dict) -> str:
    return json.dumps(_canonical(doc), indent=2) + "\n"


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def load_json_document(path: Path, expected_schema: str) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: {e}") from e
    decoder = json.JSONDecoder()
    try:
        doc, end = decoder.raw_decode(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    rest = text[end:]
    if rest.strip():
        line = text.count("\n", 0, end + len(rest) - len(rest.lstrip())) + 1
        raise ParseError(f"{path}: line {line}: trailing data after document")
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    schema = doc.get("schema")
    if schema != expected_schema:
        raise ValidationError(
            f"{path}: field 'schema': expected {expected_schema!r}, got {schema!r}"
        )
    return doc


def _field(doc: dict, name: str, types, where: str):
    if name not in doc:
        raise ValidationError(f"{where}: missing field {name!r}")
    v = doc[name]
    if isinstance(v, bool) or not isinstance(v, types):
        raise ValidationError(f"{where}: field {name!r} has wrong type {type(v).__name__}")
    return v


# ---------------------------------------------------------------- manifests


@dataclass(frozen=True)
class ClipManifest:
    """Frame-sequence description; paths are relative to the manifest file."""

    frame_pattern: str
    frame_count: int
    fps: float
    kind: str  # "perspective" | "equirect"
    width: int
    height: int
    fov: FieldOfView = None
    trajectory: str = None

    def __post_init__(self):
        if self.kind not in ("perspective", "equirect"):
            raise ValidationError(f"unknown raster kind {self.kind!r}")
        if "{index" not in self.frame_pattern:
            raise ValidationError("frame_pattern must contain an '{index...}' placeholder")
        if self.frame_count < 1 or self.fps <= 0:
            raise ValidationError("frame_count must be >= 1 and fps positive")
        if self.kind == "equirect" and self.width != 2 * self.height:
            raise ValidationError(
                f"equirect manifests need W=2H, got {self.width}x{self.height}"
            )

    def frame_path(self, root: Path, k: int) -> Path:
        return Path(root) / self.frame_pattern.format(index=k)


def _manifest_to_doc(m: ClipManifest) -> dict:
    doc = {
        "schema": SCHEMA_CLIP_MANIFEST,
        "frame_pattern": m.frame_pattern,
        "frame_count": m.frame_count,
        "fps": float(m.fps),
        "kind": m.kind,
        "width": m.width,
        "height": m.height,
    }
    if m.fov is not None:
        doc["fov"] = {"hfov": m.fov.horizontal, "vfov": m.fov.vertical}
    if m.trajectory is not None:
        doc["trajectory"] = m.trajectory
    return doc


def write_clip_manifest(m: ClipManifest, path: Path) -> None:
    _write_text_atomic(Path(path), canonical_dumps(_manifest_to_doc(m)))


def read_clip_manifest(path: Path, check_frames: bool = True) -> ClipManifest:
    path = Path(path)
    doc = load_json_document(path, SCHEMA_CLIP_MANIFEST)
    where = str(path)
    fov = None
    if "fov" in doc:
        fd = _field(doc, "fov", dict, where)
        fov = FieldOfView(
            _field(fd, "hfov", (int, float), f"{where}: fov"),
            _field(fd, "vfov", (int, float), f"{where}: fov"),
        )
    try:
        m = ClipManifest(
            frame_pattern=_field(doc, "frame_pattern", str, where),
            frame_count=_field(doc, "frame_count", int, where),
            fps=float(_field(doc, "fps", (int, float), where)),
            kind=_field(doc, "kind", str, where),
            width=_field(doc, "width", int, where),
            height=_field(doc, "height", int, where),
            fov=fov,
            trajectory=doc.get("trajectory"),
        )
    except ValidationError as e:
        raise ValidationError(f"{where}: {e}") from e
    if check_frames:
        root = path.parent
        for k in range(m.frame_count):
            fp = m.frame_path(root, k)
            if not fp.is_file():
                raise ValidationError(f"{where}: missing frame file {fp}")
            with Image.open(fp) as im:
                if im.size != (m.width, m.height):
                    raise ValidationError(
                        f"{where}: frame {fp} is {im.size[0]}x{im.size[1]}, "
                        f"manifest declares {m.width}x{m.height}"
                    )
    return m


# -------------------------------------------------------------- trajectories


def write_trajectory(traj: Trajectory, path: Path, motion_params=None) -> None:
    """Persist per-frame poses (radians) with optional simulator provenance."""
    doc = {
        "schema": SCHEMA_TRAJECTORY,
        "fov": {"hfov": traj.fov.horizontal, "vfov": traj.fov.vertical},
        "poses": [
            {"index": k, "roll": p.roll, "pitch": p.pitch, "yaw": p.yaw}
            for k, p in enumerate(traj.poses)
        ],
    }
    if motion_params is not None:
        from dataclasses import asdict

        mp = asdict(motion_params)
        doc["motion_params"] = {k: mp[k] for k in sorted(mp)}
    _write_text_atomic(Path(path), canonical_dumps(doc))


def read_trajectory(path: Path) -> Trajectory:
    traj, _ = read_trajectory_document(path)
    return traj


def read_trajectory_document(path: Path):
    """Like :func:`read_trajectory` but also returns the provenance block."""
    path = Path(path)
    doc = load_json_document(path, SCHEMA_TRAJECTORY)
    where = str(path)
    fd = _field(doc, "fov", dict, where)
    fov = FieldOfView(
        _field(fd, "hfov", (int, float), f"{where}: fov"),
        _field(fd, "vfov", (int, float), f"{where}: fov"),
    )
    records = _field(doc, "poses", list, where)
    if not records:
        raise ValidationError(f"{where}: empty pose list")
    poses = []
    for k, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise ValidationError(f"{where}: poses[{k}] must be an object")
        idx = _field(rec, "index", int, f"{where}: poses[{k}]")
        if idx != k:
            raise ValidationError(
                f"{where}: poses[{k}]: indices must be contiguous from 0, got {idx}"
            )
        vals = [
            _field(rec, nm, (int, float), f"{where}: poses[{k}]")
            for nm in ("roll", "pitch", "yaw")
        ]
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"{where}: poses[{k}]: angles must be finite")
        poses.append(EulerPose(*vals))
    motion_params = None
    if "motion_params" in doc:
        from panokit.camsim import MotionParams

        mp = _field(doc, "motion_params", dict, where)
        try:
            motion_params = MotionParams(
                **{k: (int(v) if k == "seed" else float(v)) for k, v in mp.items()}
            )
        except (TypeError, ValueError) as e:
            raise ValidationError(f"{where}: motion_params: {e}") from e
    return Trajectory(poses=tuple(poses), fov=fov), motion_params


# -------------------------------------------------------------- annotations


@dataclass(frozen=True)
class LabeledSegment:
    segment: LineSegment
    label: str = ""


@dataclass(frozen=True)
class AnnotationFile:
    """Line annotations on one perspective view."""

    image: str
    width: int
    height: int
    lines: tuple

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError("annotation image dimensions must be positive")
        lines = tuple(self.lines)
        for i, ls in enumerate(lines):
            s = ls.segment
            for x, y in ((s.x1, s.y1), (s.x2, s.y2)):
                if not (0 <= x <= self.width and 0 <= y <= self.height):
                    raise ValidationError(
                        f"lines[{i}]: endpoint ({x}, {y}) outside {self.width}x{self.height}"
                    )
        object.__setattr__(self, "lines", lines)


def annotations_to_doc(a: AnnotationFile) -> dict:
    return {
        "schema": SCHEMA_ANNOTATIONS,
        "image": a.image,
        "width": a.width,
        "height": a.height,
        "lines": [
            {
                "x1": ls.segment.x1,
                "y1": ls.segment.y1,
                "x2": ls.segment.x2,
                "y2": ls.segment.y2,
                "label": ls.label,
            }
            for ls in a.lines
        ],
    }


def annotations_from_doc(doc: dict, where: str = "annotations") -> AnnotationFile:
    records = _field(doc, "lines", list, where)
    lines = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise ValidationError(f"{where}: lines[{i}] must be an object")
        coords = [
            float(_field(rec, nm, (int, float), f"{where}: lines[{i}]"))
            for nm in ("x1", "y1", "x2", "y2")
        ]
        try:
            seg = LineSegment(*coords)
        except ValueError as e:
            raise ValidationError(f"{where}: lines[{i}]: {e}") from e
        lines.append(LabeledSegment(segment=seg, label=str(rec.get("label", ""))))
    return AnnotationFile(
        image=_field(doc, "image", str, where),
        width=_field(doc, "width", int, where),
        height=_field(doc, "height", int, where),
        lines=tuple(lines),
    )


def write_annotations(a: AnnotationFile, path: Path) -> None:
    _write_text_atomic(Path(path), canonical_dumps(annotations_to_doc(a)))


def read_annotations(path: Path) -> AnnotationFile:
    doc = load_json_document(Path(path), SCHEMA_ANNOTATIONS)
    return annotations_from_doc(doc, where=str(path))


# -------------------------------------------------------------------- frames


def save_frame(frame, path) -> None:
    """Write a frame as PNG; equirect masks go to the alpha channel.

    ``path`` may be a filesystem path or a writable binary file object.
    """
    if not hasattr(path, "write"):
        path = Path(path)
    rgb8 = np.clip(np.rint(np.asarray(frame.rgb, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)
    if isinstance(frame, EquirectFrame):
        alpha = np.where(frame.mask, 255, 0).astype(np.uint8)[..., None]
        Image.fromarray(np.concatenate([rgb8, alpha], axis=2), "RGBA").save(path, format="PNG")
    else:
        Image.fromarray(rgb8, "RGB").save(path, format="PNG")


def load_perspective_frame(path: Path) -> PerspectiveFrame:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0
    return PerspectiveFrame(rgb=arr)


def load_equirect_frame(path: Path) -> EquirectFrame:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGBA"), dtype=np.float32)
    return EquirectFrame(rgb=arr[..., :3] / 255.0, mask=arr[..., 3] >= 128)


def load_clip(manifest_path: Path, check_frames: bool = True) -> tuple[VideoClip, ClipManifest]:
    manifest_path = Path(manifest_path)
    m = read_clip_manifest(manifest_path, check_frames=check_frames)
    root = manifest_path.parent
    loader = load_equirect_frame if m.kind == "equirect" else load_perspective_frame
    frames = tuple(loader(m.frame_path(root, k)) for k in range(m.frame_count))
    return VideoClip(frames=frames, fps=m.fps), m


def save_clip(
    clip: VideoClip,
    out_dir: Path,
    fov: FieldOfView = None,
    trajectory: str = None,
    frame_pattern: str = "frame_{index:05d}.png",
) -> Path:
    """Write all frames plus a manifest.json into ``out_dir``; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    first = clip[0]
    kind = "equirect" if isinstance(first, EquirectFrame) else "perspective"
    m = ClipManifest(
        frame_pattern=frame_pattern,
        frame_count=len(clip),
        fps=clip.fps,
        kind=kind,
        width=first.width,
        height=first.height,
        fov=fov,
        trajectory=trajectory,
    )
    for k, frame in enumerate(clip.frames):
        save_frame(frame, m.frame_path(out_dir, k))
    manifest_path = out_dir / "manifest.json"
    write_clip_manifest(m, manifest_path)
    return manifest_path
