import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from helpers import smooth_frame
from panokit.cli import main
from panokit.formats import canonical_dumps, save_clip
from panokit.projection import Trajectory, project_to_equirect
from panokit.raster import VideoClip
from panokit.server import create_app
from panokit.sphere import EulerPose, FieldOfView

FOV = FieldOfView.from_degrees(90, 73.74)


@pytest.fixture
def corpus(tmp_path):
    for i, name in enumerate(["clip_a", "clip_b"]):
        frames = tuple(
            project_to_equirect(smooth_frame(48, 64, seed=10 * i + k), EulerPose(), FOV, h_eq=64)
            for k in range(3)
        )
        save_clip(VideoClip(frames=frames, fps=5.0), tmp_path / name, fov=FOV)
    return tmp_path


@pytest.fixture
def client(corpus):
    return TestClient(create_app(corpus))


def annotation_doc():
    return {
        "schema": "annotations/1",
        "image": "clip_a/frame_00000.png",
        "width": 64,
        "height": 48,
        "lines": [
            {"x1": 5.0, "y1": 6.0, "x2": 50.0, "y2": 40.0, "label": "edge"},
        ],
    }


class TestReadEndpoints:
    def test_list_clips(self, client):
        r = client.get("/clips")
        assert r.status_code == 200
        doc = r.json()
        assert doc["schema"] == "clip-list/1"
        assert [c["id"] for c in doc["clips"]] == ["clip_a", "clip_b"]
        assert doc["clips"][0]["kind"] == "equirect"

    def test_empty_root(self, tmp_path):
        client = TestClient(create_app(tmp_path / "nothing"))
        r = client.get("/clips")
        assert r.status_code == 200
        assert r.json()["clips"] == []

    def test_frame_bytes_exact(self, client, corpus):
        r = client.get("/clips/clip_a/frames/1")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content == (corpus / "clip_a" / "frame_00001.png").read_bytes()

    def test_unknown_clip_404(self, client):
        assert client.get("/clips/nope/frames/0").status_code == 404

    def test_unknown_frame_404(self, client):
        assert client.get("/clips/clip_a/frames/99").status_code == 404

    def test_unwrap_matches_cli_bitwise(self, client, corpus, tmp_path):
        params = dict(frame=1, yaw=20.0, pitch=-10.0, roll=0.0, hfov=80.0, vfov=60.0, w=64, h=48)
        r = client.get("/clips/clip_a/unwrap", params=params)
        assert r.status_code == 200
        out = tmp_path / "cli_view.png"
        rc = main([
            "unwrap", "--input", str(corpus / "clip_a" / "manifest.json"),
            "--frame", "1", "--yaw", "20", "--pitch", "-10",
            "--hfov", "80", "--vfov", "60", "--width", "64", "--height", "48",
            "--out", str(out),
        ])
        assert rc == 0
        assert r.content == out.read_bytes()

    def test_unwrap_invalid_fov_422(self, client):
        r = client.get("/clips/clip_a/unwrap", params=dict(hfov=200.0, vfov=60.0))
        assert r.status_code == 422

    def test_unwrap_deterministic(self, client):
        params = dict(frame=0, yaw=5.0, hfov=90.0, vfov=60.0, w=64, h=48)
        a = client.get("/clips/clip_a/unwrap", params=params)
        b = client.get("/clips/clip_a/unwrap", params=params)
        assert a.content == b.content


class TestAnnotations:
    def test_get_default_empty(self, client):
        r = client.get("/clips/clip_a/annotations")
        assert r.status_code == 200
        assert r.headers["X-Annotation-Revision"] == "0"
        doc = json.loads(r.content)
        assert doc["schema"] == "annotations/1" and doc["lines"] == []

    def test_post_then_get_identical_canonical_bytes(self, client):
        doc = annotation_doc()
        r = client.post("/clips/clip_a/annotations", json=doc)
        assert r.status_code == 200
        assert r.json() == {"schema": "annotation-revision/1", "revision": 1}
        got = client.get("/clips/clip_a/annotations")
        assert got.headers["X-Annotation-Revision"] == "1"
        assert got.content.decode() == canonical_dumps(doc)

    def test_last_write_wins_with_revisions(self, client):
        doc = annotation_doc()
        client.post("/clips/clip_a/annotations", json=doc)
        doc2 = annotation_doc()
        doc2["lines"][0]["label"] = "updated"
        r = client.post("/clips/clip_a/annotations", json=doc2)
        assert r.json()["revision"] == 2
        got = client.get("/clips/clip_a/annotations")
        assert json.loads(got.content)["lines"][0]["label"] == "updated"

    def test_invalid_annotation_422(self, client):
        doc = annotation_doc()
        doc["lines"][0]["x2"] = 9999.0  # outside the declared image
        assert client.post("/clips/clip_a/annotations", json=doc).status_code == 422

    def test_wrong_schema_422(self, client):
        doc = annotation_doc()
        doc["schema"] = "annotations/9"
        assert client.post("/clips/clip_a/annotations", json=doc).status_code == 422

    def test_unknown_clip_404(self, client):
        assert client.post("/clips/zzz/annotations", json=annotation_doc()).status_code == 404

    def test_annotations_persist_on_disk(self, client, corpus):
        client.post("/clips/clip_b/annotations", json=annotation_doc())
        assert (corpus / "clip_b" / "annotations.json").is_file()

    def test_clip_data_never_mutated(self, client, corpus):
        before = (corpus / "clip_a" / "frame_00000.png").read_bytes()
        client.post("/clips/clip_a/annotations", json=annotation_doc())
        client.get("/clips/clip_a/unwrap", params=dict(frame=0))
        assert (corpus / "clip_a" / "frame_00000.png").read_bytes() == before
