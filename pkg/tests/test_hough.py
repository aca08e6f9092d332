import math

import numpy as np
import pytest

from helpers import draw_line
from panokit.hough import HoughParams, hough_detect, luminance
from panokit.raster import PerspectiveFrame


def segment_angle_deg(s):
    return math.degrees(math.atan2(s.y2 - s.y1, s.x2 - s.x1)) % 180.0


def offset_from(s, px, py):
    nx, ny = -(s.y2 - s.y1) / s.length, (s.x2 - s.x1) / s.length
    return abs((px - s.x1) * nx + (py - s.y1) * ny)


def line_frame(angle_deg, h=240, w=320, width=3.0):
    rgb = np.zeros((h, w, 3), dtype=np.float32)
    ang = math.radians(angle_deg)
    cx, cy = w / 2, h / 2
    draw_line(rgb, cx - 100 * math.cos(ang), cy - 100 * math.sin(ang),
              cx + 100 * math.cos(ang), cy + 100 * math.sin(ang), width=width)
    return PerspectiveFrame(rgb=rgb)


class TestHoughDetect:
    def test_single_30deg_line(self):
        segs = hough_detect(line_frame(30))
        assert len(segs) == 1
        assert abs(segment_angle_deg(segs[0]) - 30.0) < 1.0
        assert offset_from(segs[0], 160, 120) < 2.0

    @pytest.mark.parametrize("angle", [0, 17, 45, 90, 120, 171])
    def test_angles_recovered(self, angle):
        segs = hough_detect(line_frame(angle))
        assert len(segs) == 1
        diff = abs(segment_angle_deg(segs[0]) - angle % 180)
        assert min(diff, 180 - diff) < 1.0

    def test_uniform_frame_empty(self):
        f = PerspectiveFrame(rgb=np.full((240, 320, 3), 0.5, dtype=np.float32))
        assert hough_detect(f) == []

    def test_two_orthogonal_lines(self):
        rgb = np.zeros((240, 320, 3), dtype=np.float32)
        draw_line(rgb, 40, 120, 280, 120)
        draw_line(rgb, 160, 20, 160, 220)
        segs = hough_detect(PerspectiveFrame(rgb=rgb))
        assert len(segs) == 2
        angles = sorted(segment_angle_deg(s) for s in segs)
        assert abs(angles[0] - 0.0) < 1.0 and abs(angles[1] - 90.0) < 1.0

    def test_noise_produces_nothing(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            f = PerspectiveFrame(rgb=rng.uniform(size=(240, 320, 3)).astype(np.float32))
            assert hough_detect(f) == []

    def test_deterministic(self):
        f = line_frame(63)
        a = hough_detect(f)
        b = hough_detect(f)
        assert a == b

    def test_min_length_filters(self):
        segs = hough_detect(line_frame(30), HoughParams(min_segment_length=300.0))
        assert segs == []

    def test_short_line_below_accumulator_threshold(self):
        rgb = np.zeros((240, 320, 3), dtype=np.float32)
        draw_line(rgb, 150, 115, 170, 125)  # ~22 px long
        segs = hough_detect(PerspectiveFrame(rgb=rgb), HoughParams(accumulator_threshold=60))
        assert segs == []


class TestLuminance:
    def test_weights(self):
        rgb = np.zeros((2, 2, 3))
        rgb[..., 0] = 1.0
        assert luminance(rgb)[0, 0] == pytest.approx(0.299, abs=0)

    def test_gray_passthrough(self):
        rgb = np.full((2, 2, 3), 0.42)
        np.testing.assert_allclose(luminance(rgb), 0.42, atol=1e-12)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            HoughParams(edge_threshold=0.0)
        with pytest.raises(ValueError):
            HoughParams(angular_bins=2)
        with pytest.raises(ValueError):
            HoughParams(min_segment_length=0)
