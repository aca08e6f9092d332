"""Masked PSNR, the line-consistency protocol, and yaw-sweep unwrapping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from panokit.hough import HoughParams, hough_detect
from panokit.lines import (
    Intrinsics,
    LineMatchReport,
    clip_line_to_box,
    line_through,
    match_lines,
    rotation_homography,
    transfer_line,
)
from panokit.projection import unwrap_to_perspective
from panokit.raster import VideoClip
from panokit.sphere import EulerPose, FieldOfView

__all__ = [
    "masked_psnr",
    "yaw_sweep_unwrap",
    "line_consistency",
    "LineConsistencyReport",
    "ViewEvaluation",
]

PSNR_CAP_DB = 100.0


def masked_psnr(gt, pred, mask=None) -> float:
    """10*log10(1/MSE) over masked pixels of [0, 1] frames, capped at 100 dB.

    ``gt``/``pred`` may be frames or raw HxWx3 arrays; ``mask`` defaults to the
    ground-truth frame's validity mask.
    """
    gt_rgb = np.asarray(getattr(gt, "rgb", gt), dtype=np.float64)
    pred_rgb = np.asarray(getattr(pred, "rgb", pred), dtype=np.float64)
    if gt_rgb.shape != pred_rgb.shape:
        raise ValueError(f"shape mismatch: {gt_rgb.shape} vs {pred_rgb.shape}")
    if mask is None:
        mask = getattr(gt, "mask", None)
        if mask is None:
            mask = np.ones(gt_rgb.shape[:2], dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != gt_rgb.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match frames")
    if not mask.any():
        raise ValueError("mask selects no pixels")
    diff = gt_rgb[mask] - pred_rgb[mask]
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(1.0 / mse))


def yaw_sweep_unwrap(
    pano_clip: VideoClip,
    yaw_from: float,
    yaw_to: float,
    fov: FieldOfView,
    w: int,
    h: int,
) -> tuple[VideoClip, list[EulerPose]]:
    """Unwrap frame k at a yaw interpolated linearly from ``yaw_from`` to ``yaw_to``.

    Returns the perspective clip and the ground-truth pose per frame, for
    comparison against downstream pose estimation.
    """
    t = len(pano_clip)
    if t > 1:
        yaws = [yaw_from + (yaw_to - yaw_from) * k / (t - 1) for k in range(t)]
    else:
        yaws = [yaw_from]
    poses = [EulerPose(yaw=y) for y in yaws]
    frames = tuple(
        unwrap_to_perspective(pano_clip[k], poses[k], fov, w, h) for k in range(t)
    )
    return VideoClip(frames=frames, fps=pano_clip.fps), poses


@dataclass(frozen=True)
class ViewEvaluation:
    frame_index: int
    pose: EulerPose
    n_transferred: int
    n_dropped: int  # annotations lost behind the camera / outside the view
    n_detected: int
    report: LineMatchReport


@dataclass(frozen=True)
class LineConsistencyReport:
    """Pooled matching statistics over every (frame, neighbor pose) view."""

    mean_ea: float  # sum of matched EA / matched count; 0 when nothing matched
    penalized_mean: float  # unmatched transferred ground truth counts as 0
    n_matched: int
    n_transferred: int
    n_dropped: int
    n_detected: int
    views: tuple

    def to_doc(self) -> dict:
        return {
            "mean_ea": self.mean_ea,
            "penalized_mean": self.penalized_mean,
            "n_matched": self.n_matched,
            "n_transferred": self.n_transferred,
            "n_dropped": self.n_dropped,
            "n_detected": self.n_detected,
            "n_views": len(self.views),
        }


def line_consistency(
    input_view,
    annotations,
    pano_clip: VideoClip,
    neighbor_poses,
    fov: FieldOfView,
    hough_params: HoughParams = HoughParams(),
    input_pose: EulerPose = EulerPose(),
    min_score: float = 0.3,
) -> LineConsistencyReport:
    """Transfer annotated lines into unwrapped neighbor views and score detections.

    For every frame of the panorama and every neighbor pose: unwrap a view the
    size of the input, map each annotation's supporting line through the
    rotation homography (straight structures extend beyond the annotated
    span, so the infinite line is the analytic ground truth in the neighbor
    view), clip it to the view, detect lines, and match. Annotations whose
    transferred line misses the view entirely are dropped and counted.
    Scores are pooled (sum/count) across views, so the aggregation is
    independent of evaluation order.
    """
    annotations = list(annotations)
    if not annotations:
        raise ValueError("need at least one annotated segment")
    w, h = input_view.width, input_view.height
    k_mat = Intrinsics.from_fov(fov, w, h)

    score_sum = 0.0
    n_matched = 0
    n_transferred = 0
    n_dropped = 0
    n_detected = 0
    views = []
    for k in range(len(pano_clip)):
        for pose in neighbor_poses:
            hmg = rotation_homography(k_mat, input_pose, k_mat, pose)
            transferred = []
            dropped = 0
            for seg in annotations:
                mapped = clip_line_to_box(transfer_line(line_through(seg), hmg), w, h)
                if mapped is None:
                    dropped += 1
                else:
                    transferred.append(mapped)
            view = unwrap_to_perspective(pano_clip[k], pose, fov, w, h)
            detected = hough_detect(view, hough_params)
            report = match_lines(transferred, detected, w, h, min_score=min_score)
            score_sum += sum(p[2] for p in report.pairs)
            n_matched += report.n_matched
            n_transferred += len(transferred)
            n_dropped += dropped
            n_detected += len(detected)
            views.append(
                ViewEvaluation(
                    frame_index=k,
                    pose=pose,
                    n_transferred=len(transferred),
                    n_dropped=dropped,
                    n_detected=len(detected),
                    report=report,
                )
            )
    return LineConsistencyReport(
        mean_ea=score_sum / n_matched if n_matched else 0.0,
        penalized_mean=score_sum / n_transferred if n_transferred else 0.0,
        n_matched=n_matched,
        n_transferred=n_transferred,
        n_dropped=n_dropped,
        n_detected=n_detected,
        views=tuple(views),
    )
