import json
import math
from pathlib import Path

import numpy as np
import pytest

from helpers import lined_view, smooth_frame
from panokit.cli import main
from panokit.formats import (
    AnnotationFile,
    LabeledSegment,
    load_clip,
    read_trajectory,
    save_clip,
    save_frame,
    write_annotations,
    write_trajectory,
)
from panokit.lines import LineSegment
from panokit.metrics import masked_psnr
from panokit.projection import Trajectory, project_to_equirect
from panokit.raster import VideoClip
from panokit.sphere import EulerPose, FieldOfView

FOV = FieldOfView.from_degrees(90, 73.74)


@pytest.fixture
def pers_clip(tmp_path):
    clip = VideoClip(frames=tuple(smooth_frame(48, 64, seed=k) for k in range(3)), fps=5.0)
    return save_clip(clip, tmp_path / "pers", fov=FOV)


@pytest.fixture
def traj_file(tmp_path):
    p = tmp_path / "traj.json"
    poses = tuple(EulerPose(yaw=0.1 * k) for k in range(3))
    write_trajectory(Trajectory(poses=poses, fov=FOV), p)
    return p


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["simulate", "--frames", "25", "--seed", "7", "--out", str(a)]) == 0
        assert main(["simulate", "--frames", "25", "--seed", "7", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_different_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["simulate", "--frames", "25", "--seed", "7", "--out", str(a)])
        main(["simulate", "--frames", "25", "--seed", "8", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_output_loads_with_provenance(self, tmp_path):
        out = tmp_path / "t.json"
        main(["simulate", "--frames", "10", "--seed", "3", "--out", str(out)])
        traj = read_trajectory(out)
        assert len(traj) == 10
        doc = json.loads(out.read_text())
        assert "motion_params" in doc


class TestProjectUnwrap:
    def test_project_writes_masked_sequence(self, tmp_path, pers_clip, traj_file):
        out = tmp_path / "equi"
        rc = main([
            "project", "--input", str(pers_clip), "--trajectory", str(traj_file),
            "--height", "64", "--out", str(out),
        ])
        assert rc == 0
        clip, manifest = load_clip(out / "manifest.json")
        assert manifest.kind == "equirect" and len(clip) == 3
        assert clip[0].mask.any() and not clip[0].mask.all()
        assert clip[0].rgb[~clip[0].mask].max() == 0.0

    def test_unwrap_round_trip(self, tmp_path, pers_clip, traj_file):
        equi = tmp_path / "equi"
        main(["project", "--input", str(pers_clip), "--trajectory", str(traj_file),
              "--height", "96", "--out", str(equi)])
        out_png = tmp_path / "view.png"
        rc = main([
            "unwrap", "--input", str(equi / "manifest.json"), "--frame", "0",
            "--hfov", "90", "--vfov", "73.74", "--width", "64", "--height", "48",
            "--out", str(out_png),
        ])
        assert rc == 0
        from panokit.formats import load_perspective_frame

        back = load_perspective_frame(out_png)
        src, _ = load_clip(pers_clip)
        assert masked_psnr(src[0].rgb[8:-8, 8:-8], back.rgb[8:-8, 8:-8]) > 28

    def test_align_centers_frame0(self, tmp_path, pers_clip, traj_file):
        out = tmp_path / "aligned"
        rc = main(["align", "--input", str(pers_clip), "--trajectory", str(traj_file),
                   "--height", "64", "--out", str(out)])
        assert rc == 0
        clip, _ = load_clip(out / "manifest.json")
        cols = np.nonzero(clip[0].mask.any(axis=0))[0]
        center = (cols.min() + cols.max()) / 2
        assert abs(center - 64.0) < 2.0


class TestPlan:
    def test_paper_defaults_single_window(self, capsys):
        assert main(["plan", "--total", "25"]) == 0
        assert capsys.readouterr().out.strip() == "[0,25)"

    def test_two_windows(self, capsys):
        assert main(["plan", "--total", "45", "--window", "25", "--context", "5"]) == 0
        assert capsys.readouterr().out.strip() == "[0,25) [20,45)"

    def test_invalid_args_error_line(self, capsys):
        rc = main(["plan", "--total", "10", "--window", "25", "--context", "5"])
        assert rc != 0
        err = capsys.readouterr().err
        assert err.startswith("error: ") and err.count("\n") == 1


class TestBlendWeightmap:
    def test_blend_consistent_pair_identity(self, tmp_path):
        rng = np.random.default_rng(0)
        from panokit.raster import EquirectFrame, rotate_180

        frames = tuple(
            EquirectFrame(rgb=rng.uniform(size=(32, 64, 3)).astype(np.float32))
            for _ in range(2)
        )
        a = save_clip(VideoClip(frames=frames, fps=2), tmp_path / "a")
        b = save_clip(VideoClip(frames=tuple(rotate_180(f) for f in frames), fps=2), tmp_path / "b")
        out = tmp_path / "blended"
        rc = main(["blend", "--input", str(a), "--rotated", str(b), "--out", str(out)])
        assert rc == 0
        blended, _ = load_clip(out / "manifest.json")
        reloaded, _ = load_clip(a)  # 8-bit quantization happened at save time
        for orig, got in zip(reloaded.frames, blended.frames):
            np.testing.assert_array_equal(got.rgb, orig.rgb)

    def test_weightmap_json(self, tmp_path):
        out = tmp_path / "w.json"
        rc = main(["weightmap", "--height", "64", "--delta", "0.01", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert len(doc["weights"]) == 64
        assert doc["weights"][0] == pytest.approx(0.01, abs=1e-3)

    def test_weightmap_png(self, tmp_path):
        out = tmp_path / "w.png"
        assert main(["weightmap", "--height", "64", "--out", str(out)]) == 0
        from PIL import Image

        with Image.open(out) as im:
            assert im.size == (128, 64)


class TestSweep:
    def test_sweep_writes_views_and_poses(self, tmp_path, pers_clip, traj_file):
        equi = tmp_path / "equi"
        main(["project", "--input", str(pers_clip), "--trajectory", str(traj_file),
              "--height", "64", "--out", str(equi)])
        out = tmp_path / "sweep"
        rc = main([
            "sweep", "--input", str(equi / "manifest.json"),
            "--from-yaw", "45", "--to-yaw", "-45",
            "--hfov", "90", "--vfov", "73.74",
            "--width", "64", "--height", "48", "--out", str(out),
        ])
        assert rc == 0
        traj = read_trajectory(out / "trajectory.json")
        assert traj.poses[0].yaw == pytest.approx(math.radians(45), abs=1e-9)
        assert traj.poses[-1].yaw == pytest.approx(math.radians(-45), abs=1e-9)
        clip, _ = load_clip(out / "manifest.json")
        assert len(clip) == 3


class TestFilterCommand:
    def test_filter_on_committed_corpus(self, tmp_path, capsys):
        corpus = Path(__file__).parent / "data" / "filter_corpus" / "corpus.json"
        out = tmp_path / "verdicts.json"
        rc = main(["filter", "--corpus", str(corpus), "--out", str(out)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "accepted=2" in printed
        doc = json.loads(out.read_text())
        assert doc["summary"]["accepted"] == 2


class TestMetricCommands:
    def test_psnr_between_clips(self, tmp_path, capsys):
        f = smooth_frame(48, 64)
        eq = project_to_equirect(f, EulerPose(), FOV, h_eq=64)
        a = save_clip(VideoClip(frames=(eq,), fps=1), tmp_path / "gt")
        rgb = eq.rgb.copy()
        rgb[eq.mask] = np.clip(rgb[eq.mask] + 10 / 255.0, 0, 1)
        from panokit.raster import EquirectFrame

        noisy = EquirectFrame(rgb=rgb, mask=eq.mask)
        b = save_clip(VideoClip(frames=(noisy,), fps=1), tmp_path / "pred")
        rc = main(["metric", "psnr", "--gt", str(a), "--pred", str(b)])
        assert rc == 0
        line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("masked_psnr_db=")][0]
        assert float(line.split("=")[1]) == pytest.approx(28.13, abs=0.2)

    def test_line_metric_end_to_end(self, tmp_path, capsys):
        view, lines = lined_view()
        pano = project_to_equirect(view, EulerPose(), FOV, h_eq=512)
        pano_dir = save_clip(VideoClip(frames=(pano,), fps=1), tmp_path / "pano")
        view_png = tmp_path / "view.png"
        save_frame(view, view_png)
        ann_path = tmp_path / "ann.json"
        write_annotations(
            AnnotationFile(
                image="view.png", width=view.width, height=view.height,
                lines=tuple(LabeledSegment(LineSegment(*l), f"l{i}") for i, l in enumerate(lines)),
            ),
            ann_path,
        )
        out = tmp_path / "report.json"
        rc = main([
            "metric", "line", "--pano", str(pano_dir), "--input-view", str(view_png),
            "--annotations", str(ann_path), "--neighbors", "0",
            "--hfov", "90", "--vfov", "73.74", "--out", str(out),
        ])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["mean_ea"] >= 0.95
        assert "mean_ea=" in capsys.readouterr().out

    def test_error_is_single_line(self, capsys):
        rc = main(["metric", "psnr", "--gt", "/nonexistent/x.json", "--pred", "/nonexistent/y.json"])
        assert rc == 2
        err = capsys.readouterr().err
        assert err.startswith("error: ") and err.strip().count("\n") == 0
