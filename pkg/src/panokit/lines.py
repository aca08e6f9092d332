"""Line segments, rotation homographies, the EA similarity, and matching.

Two views sharing a camera center are related by the pixel map
``P_B @ R_B^T @ R_A @ P_A^{-1}``, where ``P = pixel_from_dir(K)`` projects a
camera-frame direction (+X forward, +Y right, +Z up) to homogeneous pixels.
The homogeneous w component of a mapped point equals the forward component of
its direction in the target camera, so w <= 0 identifies content behind the
camera.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from panokit.sphere import EulerPose, FieldOfView, rotation_from_pose

__all__ = [
    "LineSegment",
    "HomogeneousLine",
    "Intrinsics",
    "LineMatchReport",
    "pixel_from_dir",
    "rotation_homography",
    "transfer_line",
    "transfer_segment",
    "line_through",
    "clip_line_to_box",
    "ea_score",
    "match_lines",
]


@dataclass(frozen=True)
class LineSegment:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if self.x1 == self.x2 and self.y1 == self.y2:
            raise ValueError(f"degenerate segment at ({self.x1}, {self.y1})")

    @property
    def midpoint(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)


@dataclass(frozen=True)
class HomogeneousLine:
    """Coefficients of ax + by + c = 0, normalized so a^2 + b^2 = 1."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        n = math.hypot(self.a, self.b)
        if n == 0.0:
            raise ValueError("line normal (a, b) must be nonzero")
        object.__setattr__(self, "a", self.a / n)
        object.__setattr__(self, "b", self.b / n)
        object.__setattr__(self, "c", self.c / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixels."""

    f_x: float
    f_y: float
    c_x: float
    c_y: float

    def __post_init__(self):
        if self.f_x <= 0 or self.f_y <= 0:
            raise ValueError("focal lengths must be positive")

    @classmethod
    def from_fov(cls, fov: FieldOfView, w: int, h: int) -> "Intrinsics":
        return cls(
            f_x=(w / 2.0) / math.tan(fov.horizontal / 2.0),
            f_y=(h / 2.0) / math.tan(fov.vertical / 2.0),
            c_x=w / 2.0,
            c_y=h / 2.0,
        )


def pixel_from_dir(k: Intrinsics) -> np.ndarray:
    """Homogeneous pixel of a camera direction: u = cx + fx*Y/X, v = cy - fy*Z/X."""
    return np.array(
        [
            [k.c_x, k.f_x, 0.0],
            [k.c_y, 0.0, -k.f_y],
            [1.0, 0.0, 0.0],
        ]
    )


def rotation_homography(
    k_a: Intrinsics, p_a: EulerPose, k_b: Intrinsics, p_b: EulerPose
) -> np.ndarray:
    """3x3 map taking pixels of view A to pixels of view B (shared center)."""
    p_mat_a = pixel_from_dir(k_a)
    p_mat_b = pixel_from_dir(k_b)
    r_rel = rotation_from_pose(p_b).T @ rotation_from_pose(p_a)
    return p_mat_b @ r_rel @ np.linalg.inv(p_mat_a)


def transfer_line(l: HomogeneousLine, H: np.ndarray) -> HomogeneousLine:
    """Map a line through a homography: l' ~ H^{-T} l."""
    H = np.asarray(H, dtype=np.float64)
    try:
        v = np.linalg.inv(H).T @ l.as_array()
    except np.linalg.LinAlgError as e:
        raise ValueError(f"homography is singular: {e}") from e
    return HomogeneousLine(*v)


def transfer_segment(
    seg: LineSegment, H: np.ndarray, w: int, h: int
) -> LineSegment | None:
    """Map a segment's endpoints through ``H`` and clip to the target image box.

    Returns None when the content lies behind the target camera or falls
    entirely outside the frame.
    """
    H = np.asarray(H, dtype=np.float64)
    pts = []
    for x, y in ((seg.x1, seg.y1), (seg.x2, seg.y2)):
        q = H @ np.array([x, y, 1.0])
        if q[2] <= 1e-12:
            return None
        pts.append(q[:2] / q[2])
    (x1, y1), (x2, y2) = pts
    if (x1, y1) == (x2, y2):
        return None
    return _clip_segment_to_box(x1, y1, x2, y2, w, h)


def line_through(seg: LineSegment) -> HomogeneousLine:
    """Infinite line supporting a segment (cross product of homogeneous endpoints)."""
    p1 = np.array([seg.x1, seg.y1, 1.0])
    p2 = np.array([seg.x2, seg.y2, 1.0])
    return HomogeneousLine(*np.cross(p1, p2))


def clip_line_to_box(l: HomogeneousLine, w: int, h: int) -> LineSegment | None:
    """Portion of an infinite line inside [0, w] x [0, h], or None if it misses."""
    pts = []
    # intersect with x = 0, x = w, y = 0, y = h
    if abs(l.b) > 1e-15:
        for x in (0.0, float(w)):
            y = -(l.a * x + l.c) / l.b
            if -1e-9 <= y <= h + 1e-9:
                pts.append((x, min(max(y, 0.0), float(h))))
    if abs(l.a) > 1e-15:
        for y in (0.0, float(h)):
            x = -(l.b * y + l.c) / l.a
            if -1e-9 <= x <= w + 1e-9:
                pts.append((min(max(x, 0.0), float(w)), y))
    if len(pts) < 2:
        return None
    pts = sorted(set(pts))
    p1, p2 = pts[0], pts[-1]
    if math.hypot(p2[0] - p1[0], p2[1] - p1[1]) < 1e-9:
        return None
    return LineSegment(p1[0], p1[1], p2[0], p2[1])


def _clip_segment_to_box(x1, y1, x2, y2, w, h) -> LineSegment | None:
    """Liang-Barsky clip of a segment against [0, w] x [0, h]."""
    dx, dy = x2 - x1, y2 - y1
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, x1 - 0.0),
        (dx, w - x1),
        (-dy, y1 - 0.0),
        (dy, h - y1),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    if t0 >= t1:
        return None
    a = (x1 + t0 * dx, y1 + t0 * dy)
    b = (x1 + t1 * dx, y1 + t1 * dy)
    if math.hypot(b[0] - a[0], b[1] - a[1]) < 1e-9:
        return None
    return LineSegment(a[0], a[1], b[0], b[1])


def ea_score(l1: LineSegment, l2: LineSegment, w: int, h: int) -> float:
    """Similarity in [0, 1]: squared product of angle and midpoint-distance terms.

    S_theta = 1 - acute_angle / (pi/2); S_d = max(0, 1 - |m1 - m2| / diagonal).
    """
    if w < 1 or h < 1:
        raise ValueError(f"image dimensions must be positive, got {w}x{h}")
    d1 = (l1.x2 - l1.x1, l1.y2 - l1.y1)
    d2 = (l2.x2 - l2.x1, l2.y2 - l2.y1)
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    dot = d1[0] * d2[0] + d1[1] * d2[1]
    angle = math.atan2(abs(cross), abs(dot))  # acute angle in [0, pi/2]
    s_theta = 1.0 - min(angle, math.pi / 2) / (math.pi / 2)
    m1, m2 = l1.midpoint, l2.midpoint
    s_d = max(0.0, 1.0 - math.hypot(m1[0] - m2[0], m1[1] - m2[1]) / math.hypot(w, h))
    return (s_theta * s_d) ** 2


@dataclass(frozen=True)
class LineMatchReport:
    """Optimal one-to-one pairing of ground-truth and detected lines."""

    pairs: tuple  # (gt_index, det_index, ea) triples, score-descending
    n_gt: int
    n_det: int
    mean_score: float  # over matched pairs; 0.0 when nothing matched
    penalized_mean: float  # unmatched ground-truth lines count as 0

    @property
    def n_matched(self) -> int:
        return len(self.pairs)

    @property
    def unmatched_gt(self) -> int:
        return self.n_gt - len(self.pairs)

    @property
    def unmatched_det(self) -> int:
        return self.n_det - len(self.pairs)


def match_lines(
    gt: list[LineSegment],
    det: list[LineSegment],
    w: int,
    h: int,
    min_score: float = 0.3,
) -> LineMatchReport:
    """Maximum-total-EA assignment; pairs under ``min_score`` are dropped."""
    if not gt or not det:
        return LineMatchReport(
            pairs=(), n_gt=len(gt), n_det=len(det), mean_score=0.0, penalized_mean=0.0
        )
    scores = np.array([[ea_score(g, d, w, h) for d in det] for g in gt])
    rows, cols = scipy.optimize.linear_sum_assignment(scores, maximize=True)
    pairs = [
        (int(r), int(c), float(scores[r, c]))
        for r, c in zip(rows, cols)
        if scores[r, c] >= min_score
    ]
    pairs.sort(key=lambda p: (-p[2], p[0]))
    total = sum(p[2] for p in pairs)
    return LineMatchReport(
        pairs=tuple(pairs),
        n_gt=len(gt),
        n_det=len(det),
        mean_score=total / len(pairs) if pairs else 0.0,
        penalized_mean=total / len(gt) if gt else 0.0,
    )
