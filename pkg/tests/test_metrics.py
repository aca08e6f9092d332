import math

import numpy as np
import pytest

from helpers import great_circle_pano, lined_view, noise_pano, smooth_frame
from panokit.lines import HomogeneousLine, LineSegment, clip_line_to_box, pixel_from_dir, Intrinsics
from panokit.metrics import line_consistency, masked_psnr, yaw_sweep_unwrap
from panokit.projection import project_to_equirect, unwrap_to_perspective
from panokit.raster import EquirectFrame, VideoClip
from panokit.sphere import EulerPose, FieldOfView, relative_pose, rotation_from_pose

FOV = FieldOfView.from_degrees(90, 73.74)  # ~square pixels at 320x240


class TestMaskedPsnr:
    def test_equal_frames_capped(self):
        f = smooth_frame(32, 32)
        assert masked_psnr(f.rgb, f.rgb) == 100.0

    def test_uniform_error_closed_form(self):
        gt = np.full((16, 16, 3), 0.5)
        pred = gt + 10.0 / 255.0
        expect = 20 * math.log10(255.0 / 10.0)
        assert masked_psnr(gt, pred) == pytest.approx(expect, abs=1e-9)

    def test_mask_restriction_matches_bruteforce(self):
        rng = np.random.default_rng(8)
        gt = rng.uniform(size=(12, 14, 3))
        pred = rng.uniform(size=(12, 14, 3))
        mask = rng.uniform(size=(12, 14)) > 0.5
        got = masked_psnr(gt, pred, mask)
        # brute force: loop every masked pixel
        total, count = 0.0, 0
        for r in range(12):
            for c in range(14):
                if mask[r, c]:
                    for ch in range(3):
                        total += (gt[r, c, ch] - pred[r, c, ch]) ** 2
                        count += 1
        assert got == pytest.approx(10 * math.log10(count / total), abs=1e-12)

    def test_restricting_mask_to_correct_half(self):
        gt = np.full((8, 8, 3), 0.25)
        pred = gt.copy()
        pred[:, 4:] += 0.1  # right half wrong
        left = np.zeros((8, 8), dtype=bool)
        left[:, :4] = True
        assert masked_psnr(gt, pred, left) == 100.0
        assert masked_psnr(gt, pred, ~left) == pytest.approx(20.0, abs=1e-9)
        assert masked_psnr(gt, pred, np.ones((8, 8), bool)) == pytest.approx(
            10 * math.log10(1 / (0.1 ** 2 / 2)), abs=1e-9
        )

    def test_monotone_in_noise_amplitude(self):
        rng = np.random.default_rng(3)
        gt = np.full((32, 32, 3), 0.5)
        noise = rng.standard_normal((32, 32, 3))
        vals = [
            masked_psnr(gt, np.clip(gt + a * noise, 0, 1)) for a in (0.01, 0.05, 0.2)
        ]
        assert vals[0] > vals[1] > vals[2]

    def test_empty_mask_rejected(self):
        gt = np.zeros((4, 4, 3))
        with pytest.raises(ValueError):
            masked_psnr(gt, gt, np.zeros((4, 4), bool))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            masked_psnr(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))

    def test_equirect_frame_mask_default(self):
        rgb = np.zeros((8, 16, 3), dtype=np.float32)
        mask = np.zeros((8, 16), dtype=bool)
        mask[2:6, 3:9] = True
        gt = EquirectFrame(rgb=rgb, mask=mask)
        pred = rgb + 0.1
        assert masked_psnr(gt, pred) == pytest.approx(20.0, abs=1e-6)


class TestYawSweep:
    def make_clip(self, t=5):
        frames = tuple(
            project_to_equirect(smooth_frame(seed=k), EulerPose(), FOV, h_eq=64)
            for k in range(t)
        )
        return VideoClip(frames=frames, fps=5)

    def test_constant_sweep_is_plain_unwrap(self):
        clip = self.make_clip(3)
        out, poses = yaw_sweep_unwrap(clip, 0.0, 0.0, FOV, 64, 48)
        assert all(p == EulerPose() for p in poses)
        direct = unwrap_to_perspective(clip[1], EulerPose(), FOV, 64, 48)
        np.testing.assert_array_equal(out[1].rgb, direct.rgb)

    def test_linear_spacing_25_frames(self):
        clip = self.make_clip(25)
        _, poses = yaw_sweep_unwrap(
            clip, math.radians(45), math.radians(-45), FOV, 64, 48
        )
        step = math.radians(-3.75)
        for k, p in enumerate(poses):
            assert p.yaw == pytest.approx(math.radians(45) + k * step, abs=1e-12)

    def test_poses_round_trip_through_relative_pose(self):
        clip = self.make_clip(7)
        _, poses = yaw_sweep_unwrap(clip, 0.6, -0.6, FOV, 64, 48)
        for p in poses:
            rel = relative_pose(p, poses[0])
            np.testing.assert_allclose(
                rotation_from_pose(rel),
                rotation_from_pose(poses[0]).T @ rotation_from_pose(p),
                atol=1e-9,
            )
            assert abs(rel.yaw - (p.yaw - poses[0].yaw)) < 1e-9
            assert abs(rel.roll) < 1e-9 and abs(rel.pitch) < 1e-9


class TestLineConsistency:
    def test_self_consistency_panorama(self):
        view, lines = lined_view()
        pano = project_to_equirect(view, EulerPose(), FOV, h_eq=512)
        clip = VideoClip(frames=(pano,), fps=1)
        annotations = [LineSegment(*l) for l in lines]
        report = line_consistency(view, annotations, clip, [EulerPose()], FOV)
        assert report.n_matched >= 1
        assert report.mean_ea >= 0.95

    def test_noise_panorama_floor(self):
        view, lines = lined_view()
        annotations = [LineSegment(*l) for l in lines]
        neighbors = [EulerPose(), EulerPose(yaw=math.radians(25))]
        scores = []
        for seed in range(20):
            clip = VideoClip(frames=(noise_pano(h_eq=128, seed=seed),), fps=1)
            r = line_consistency(view, annotations, clip, neighbors, FOV)
            scores.append(r.mean_ea)
        assert float(np.mean(scores)) <= 0.3

    def test_great_circle_road(self):
        pano, normal = great_circle_pano(h_eq=256)
        clip = VideoClip(frames=(pano,), fps=1)
        w, h = 320, 240
        # analytic image of the painted plane in the identity view
        k_mat = pixel_from_dir(Intrinsics.from_fov(FOV, w, h))
        l = np.linalg.inv(k_mat).T @ normal
        seg = clip_line_to_box(HomogeneousLine(*l), w, h)
        assert seg is not None
        input_view = unwrap_to_perspective(pano, EulerPose(), FOV, w, h)
        for yaw in (math.radians(30), math.radians(-30)):
            report = line_consistency(
                input_view, [seg], clip, [EulerPose(yaw=yaw)], FOV
            )
            assert report.n_matched == 1
            assert report.mean_ea >= 0.8

    def test_requires_annotations(self):
        view, _ = lined_view()
        clip = VideoClip(frames=(noise_pano(),), fps=1)
        with pytest.raises(ValueError):
            line_consistency(view, [], clip, [EulerPose()], FOV)

    def test_opposite_view_sees_nothing(self):
        # the line extensions still cross the backward view, but the
        # conditioning panorama is black there: nothing detected, score 0
        view, lines = lined_view()
        pano = project_to_equirect(view, EulerPose(), FOV, h_eq=256)
        clip = VideoClip(frames=(pano,), fps=1)
        annotations = [LineSegment(*l) for l in lines]
        report = line_consistency(
            view, annotations, clip, [EulerPose(yaw=math.pi)], FOV
        )
        assert report.n_detected == 0
        assert report.n_matched == 0
        assert report.mean_ea == 0.0

    def test_line_missing_view_counted_dropped(self):
        view, _ = lined_view()
        pano = project_to_equirect(view, EulerPose(), FOV, h_eq=256)
        clip = VideoClip(frames=(pano,), fps=1)
        # a near-horizontal line far above the view stays out of frame when
        # the neighbor pitches down hard
        ann = [LineSegment(0.0, 1.0, 320.0, 2.0)]
        report = line_consistency(
            view, ann, clip, [EulerPose(pitch=math.radians(40))], FOV
        )
        assert report.n_dropped == 1
        assert report.n_transferred == 0
