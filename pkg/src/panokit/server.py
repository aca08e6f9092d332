"""Read-mostly HTTP service feeding the viewer/annotator.

The corpus root holds one subdirectory per clip, each with a manifest.json
and its frames. Clip data is immutable; annotations are the only writable
resource (last write wins, persisted atomically, one lock per clip). Unwrap
responses are pure functions of (clip, frame, pose, fov, dims), so clients
may cache them freely.
"""

from __future__ import annotations

import io
import math
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from panokit.formats import (
    FormatError,
    annotations_from_doc,
    annotations_to_doc,
    canonical_dumps,
    load_clip,
    save_frame,
)
from panokit.projection import unwrap_to_perspective
from panokit.sphere import EulerPose, FieldOfView

SCHEMA_CLIP_LIST = "clip-list/1"
SCHEMA_REVISION = "annotation-revision/1"

_MAX_VIEW_DIM = 2048


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"schema": "error/1", "error": message})


class _ClipStore:
    """Lazy clip cache plus per-clip annotation locks and revisions."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._clips: dict = {}
        self._locks: dict = {}
        self._store_lock = threading.Lock()

    def ids(self) -> list[str]:
        out = []
        for d in sorted(self.root.iterdir()) if self.root.is_dir() else []:
            if d.is_dir() and (d / "manifest.json").is_file():
                out.append(d.name)
        return out

    def get(self, clip_id: str):
        if "/" in clip_id or clip_id in ("", ".", ".."):
            return None
        with self._store_lock:
            if clip_id in self._clips:
                return self._clips[clip_id]
        manifest = self.root / clip_id / "manifest.json"
        if not manifest.is_file():
            return None
        loaded = load_clip(manifest)
        with self._store_lock:
            self._clips[clip_id] = loaded
        return loaded

    def lock_for(self, clip_id: str) -> threading.Lock:
        with self._store_lock:
            return self._locks.setdefault(clip_id, threading.Lock())

    def annotation_paths(self, clip_id: str) -> tuple[Path, Path]:
        d = self.root / clip_id
        return d / "annotations.json", d / "annotations.rev"

    def revision(self, clip_id: str) -> int:
        _, rev = self.annotation_paths(clip_id)
        try:
            return int(rev.read_text().strip())
        except (OSError, ValueError):
            return 0


def create_app(root: Path) -> FastAPI:
    app = FastAPI(title="panokit service")
    store = _ClipStore(root)

    @app.get("/clips")
    def list_clips():
        clips = []
        for clip_id in store.ids():
            try:
                clip, manifest = store.get(clip_id)
            except FormatError:
                continue  # unreadable clips are invisible, not fatal
            clips.append(
                {
                    "id": clip_id,
                    "frame_count": manifest.frame_count,
                    "fps": manifest.fps,
                    "kind": manifest.kind,
                    "width": manifest.width,
                    "height": manifest.height,
                }
            )
        return {"schema": SCHEMA_CLIP_LIST, "clips": clips}

    @app.get("/clips/{clip_id}/frames/{k}")
    def get_frame(clip_id: str, k: int):
        found = store.get(clip_id)
        if found is None:
            return _error(404, f"unknown clip {clip_id!r}")
        clip, manifest = found
        if not (0 <= k < manifest.frame_count):
            return _error(404, f"frame {k} outside [0, {manifest.frame_count})")
        path = manifest.frame_path(store.root / clip_id, k)
        return Response(
            content=path.read_bytes(),
            media_type="image/png",
            headers={"X-Schema": "frame-png/1"},
        )

    @app.get("/clips/{clip_id}/unwrap")
    def get_unwrap(
        clip_id: str,
        frame: int = 0,
        yaw: float = 0.0,
        pitch: float = 0.0,
        roll: float = 0.0,
        hfov: float = 90.0,
        vfov: float = 60.0,
        w: int = 640,
        h: int = 480,
    ):
        found = store.get(clip_id)
        if found is None:
            return _error(404, f"unknown clip {clip_id!r}")
        clip, manifest = found
        if manifest.kind != "equirect":
            return _error(400, f"clip {clip_id!r} is not equirect")
        if not (0 <= frame < len(clip)):
            return _error(404, f"frame {frame} outside [0, {len(clip)})")
        if not (8 <= w <= _MAX_VIEW_DIM and 8 <= h <= _MAX_VIEW_DIM):
            return _error(422, f"view dimensions must lie in [8, {_MAX_VIEW_DIM}]")
        try:
            fov = FieldOfView.from_degrees(hfov, vfov)
            pose = EulerPose(math.radians(roll), math.radians(pitch), math.radians(yaw))
        except ValueError as e:
            return _error(422, str(e))
        view = unwrap_to_perspective(clip[frame], pose, fov, w, h)
        buf = io.BytesIO()
        save_frame(view, buf)
        return Response(
            content=buf.getvalue(),
            media_type="image/png",
            headers={"X-Schema": "frame-png/1", "Cache-Control": "max-age=31536000, immutable"},
        )

    @app.get("/clips/{clip_id}/annotations")
    def get_annotations(clip_id: str):
        found = store.get(clip_id)
        if found is None:
            return _error(404, f"unknown clip {clip_id!r}")
        ann_path, _ = store.annotation_paths(clip_id)
        revision = store.revision(clip_id)
        if ann_path.is_file():
            body = ann_path.read_text(encoding="utf-8")
        else:
            _, manifest = found
            body = canonical_dumps(
                {
                    "schema": "annotations/1",
                    "image": f"{clip_id}/frame_00000.png",
                    "width": manifest.width,
                    "height": manifest.height,
                    "lines": [],
                }
            )
        return Response(
            content=body,
            media_type="application/json",
            headers={"X-Annotation-Revision": str(revision)},
        )

    @app.post("/clips/{clip_id}/annotations")
    async def post_annotations(clip_id: str, request: Request):
        found = store.get(clip_id)
        if found is None:
            return _error(404, f"unknown clip {clip_id!r}")
        try:
            doc = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(doc, dict) or doc.get("schema") != "annotations/1":
            return _error(422, "expected an annotations/1 document")
        try:
            ann = annotations_from_doc(doc)
        except FormatError as e:
            return _error(422, str(e))
        ann_path, rev_path = store.annotation_paths(clip_id)
        with store.lock_for(clip_id):
            revision = store.revision(clip_id) + 1
            tmp = ann_path.with_name(ann_path.name + ".tmp")
            tmp.write_text(canonical_dumps(annotations_to_doc(ann)), encoding="utf-8")
            tmp.replace(ann_path)
            rev_tmp = rev_path.with_name(rev_path.name + ".tmp")
            rev_tmp.write_text(str(revision), encoding="utf-8")
            rev_tmp.replace(rev_path)
        return {"schema": SCHEMA_REVISION, "revision": revision}

    return app
