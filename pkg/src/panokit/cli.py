"""Command-line entry points for every pipeline stage.

Angles are degrees at this boundary and radians inside the library. Every
command validates its inputs up front, writes outputs through the canonical
formats, and exits nonzero with a single ``error: ...`` line on stderr when
anything is wrong. All randomness sits behind an explicit --seed, so a fixed
seed and fixed inputs reproduce output bytes exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from panokit import blend as blendmod
from panokit.camsim import MotionParams, ParamRanges, sample_params, simulate_clip_trajectory
from panokit.datafilter import FilterConfig, run_pipeline, write_verdicts
from panokit.formats import (
    FormatError,
    load_clip,
    load_perspective_frame,
    read_annotations,
    read_trajectory,
    save_clip,
    save_frame,
    write_trajectory,
    canonical_dumps,
)
from panokit.hough import HoughParams
from panokit.lines import LineSegment
from panokit.metrics import line_consistency, masked_psnr, yaw_sweep_unwrap
from panokit.projection import (
    Trajectory,
    align_clip,
    plan_windows,
    project_to_equirect,
    unwrap_to_perspective,
)
from panokit.raster import VideoClip
from panokit.sphere import EulerPose, FieldOfView


def _deg(x: float) -> float:
    return math.radians(x)


def _fov_from_args(args) -> FieldOfView:
    return FieldOfView.from_degrees(args.hfov, args.vfov)


def _pose_from_args(args) -> EulerPose:
    return EulerPose(_deg(args.roll), _deg(args.pitch), _deg(args.yaw))


def cmd_project(args) -> int:
    clip, _ = load_clip(args.input)
    traj = read_trajectory(args.trajectory)
    if len(traj) != len(clip):
        raise ValueError(f"trajectory length {len(traj)} != clip length {len(clip)}")
    frames = tuple(
        project_to_equirect(clip[k], traj.poses[k], traj.fov, args.height)
        for k in range(len(clip))
    )
    out = save_clip(VideoClip(frames=frames, fps=clip.fps), args.out, fov=traj.fov)
    print(f"wrote {out}")
    return 0


def cmd_align(args) -> int:
    clip, _ = load_clip(args.input)
    traj = read_trajectory(args.trajectory)
    aligned = align_clip(clip, traj, args.height)
    out = save_clip(aligned, args.out, fov=traj.fov)
    print(f"wrote {out}")
    return 0


def cmd_unwrap(args) -> int:
    clip, _ = load_clip(args.input)
    fov = _fov_from_args(args)
    pose = _pose_from_args(args)
    if args.frame is not None:
        if not (0 <= args.frame < len(clip)):
            raise ValueError(f"frame {args.frame} outside clip of {len(clip)} frames")
        view = unwrap_to_perspective(clip[args.frame], pose, fov, args.width, args.height)
        save_frame(view, args.out)
    else:
        frames = tuple(
            unwrap_to_perspective(f, pose, fov, args.width, args.height)
            for f in clip.frames
        )
        save_clip(VideoClip(frames=frames, fps=clip.fps), args.out, fov=fov)
    print(f"wrote {args.out}")
    return 0


def cmd_simulate(args) -> int:
    ranges = ParamRanges()
    if args.ranges:
        doc = json.loads(Path(args.ranges).read_text(encoding="utf-8"))
        ranges = ParamRanges(**{k: tuple(v) for k, v in doc.items()})
    params, fov = sample_params(ranges, args.seed)
    traj = simulate_clip_trajectory(params, fov, args.frames)
    write_trajectory(traj, args.out, motion_params=params)
    print(f"wrote {args.out}")
    return 0


def cmd_blend(args) -> int:
    clip_a, _ = load_clip(args.input)
    clip_b, _ = load_clip(args.rotated)
    if len(clip_a) != len(clip_b):
        raise ValueError(f"clip lengths differ: {len(clip_a)} vs {len(clip_b)}")
    frames = tuple(
        blendmod.blend_pair(a, b) for a, b in zip(clip_a.frames, clip_b.frames)
    )
    out = save_clip(VideoClip(frames=frames, fps=clip_a.fps), args.out)
    print(f"wrote {out}")
    return 0


def cmd_weightmap(args) -> int:
    m = blendmod.latitude_weights(args.height, args.delta)
    out = Path(args.out)
    if out.suffix == ".json":
        doc = {
            "schema": "latitude-weights/1",
            "height": m.height,
            "delta": m.delta,
            "weights": [float(w) for w in m.weights],
        }
        out.write_text(canonical_dumps(doc), encoding="utf-8")
    else:
        from PIL import Image

        # scaled to the map maximum for inspection
        scaled = (m.weights / m.weights.max() * 255.0).round().astype(np.uint8)
        img = np.repeat(scaled[:, None], 2 * m.height, axis=1)
        Image.fromarray(img, "L").save(out)
    print(f"wrote {out} (min={m.weights.min():.6f} max={m.weights.max():.6f})")
    return 0


def cmd_plan(args) -> int:
    plan = plan_windows(args.total, args.window, args.context)
    print(" ".join(f"[{a},{b})" for a, b in plan.windows))
    return 0


def cmd_sweep(args) -> int:
    clip, _ = load_clip(args.input)
    fov = _fov_from_args(args)
    views, poses = yaw_sweep_unwrap(
        clip, _deg(args.from_yaw), _deg(args.to_yaw), fov, args.width, args.height
    )
    out_dir = Path(args.out)
    save_clip(views, out_dir, fov=fov, trajectory="trajectory.json")
    write_trajectory(Trajectory(poses=tuple(poses), fov=fov), out_dir / "trajectory.json")
    print(f"wrote {out_dir}")
    return 0


def cmd_filter(args) -> int:
    config = FilterConfig()
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = FilterConfig.from_doc(doc)
    result = run_pipeline(args.corpus, config)
    write_verdicts(result, args.out)
    for k, v in result.summary().items():
        print(f"{k}={v}")
    return 0


def cmd_metric_psnr(args) -> int:
    gt, _ = load_clip(args.gt)
    pred, _ = load_clip(args.pred)
    if len(gt) != len(pred):
        raise ValueError(f"clip lengths differ: {len(gt)} vs {len(pred)}")
    values = [masked_psnr(g, p) for g, p in zip(gt.frames, pred.frames)]
    mean = float(np.mean(values))
    print(f"masked_psnr_db={mean:.6f}")
    print(f"frames={len(values)}")
    if args.out:
        doc = {
            "schema": "metric-report/1",
            "metric": "masked_psnr",
            "mean_db": mean,
            "per_frame_db": values,
        }
        Path(args.out).write_text(canonical_dumps(doc), encoding="utf-8")
    return 0


def cmd_metric_line(args) -> int:
    pano, _ = load_clip(args.pano)
    view = load_perspective_frame(args.input_view)
    ann = read_annotations(args.annotations)
    segments = [ls.segment for ls in ann.lines]
    neighbors = [EulerPose(yaw=_deg(float(y))) for y in args.neighbors.split(",")]
    fov = _fov_from_args(args)
    hough = HoughParams(min_segment_length=args.min_segment_length)
    report = line_consistency(
        view, segments, pano, neighbors, fov, hough_params=hough, min_score=args.min_score
    )
    for k, v in report.to_doc().items():
        print(f"{k}={v}")
    if args.out:
        doc = {"schema": "metric-report/1", "metric": "line_consistency"}
        doc.update(report.to_doc())
        Path(args.out).write_text(canonical_dumps(doc), encoding="utf-8")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from panokit.server import create_app

    app = create_app(Path(args.root))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _add_fov_args(p, required=True):
    p.add_argument("--hfov", type=float, required=required, default=None if required else 90.0,
                   help="horizontal field of view, degrees")
    p.add_argument("--vfov", type=float, required=required, default=None if required else 60.0,
                   help="vertical field of view, degrees")


def _add_pose_args(p):
    p.add_argument("--yaw", type=float, default=0.0, help="degrees")
    p.add_argument("--pitch", type=float, default=0.0, help="degrees")
    p.add_argument("--roll", type=float, default=0.0, help="degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panokit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a perspective clip onto masked equirect maps")
    p.add_argument("--input", required=True, help="perspective clip manifest")
    p.add_argument("--trajectory", required=True, help="trajectory file (poses per frame)")
    p.add_argument("--height", type=int, default=512, help="equirect height (width is 2x)")
    p.add_argument("--out", required=True, help="output clip directory")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("align", help="project with poses relative to frame 0 (shared coordinates)")
    p.add_argument("--input", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("unwrap", help="extract a perspective view from an equirect clip")
    p.add_argument("--input", required=True, help="equirect clip manifest")
    p.add_argument("--frame", type=int, default=None, help="single frame index (default: all)")
    _add_pose_args(p)
    _add_fov_args(p)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out", required=True, help="output PNG (single frame) or directory")
    p.set_defaults(func=cmd_unwrap)

    p = sub.add_parser("simulate", help="sample motion parameters and write a trajectory")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ranges", default=None, help="JSON file overriding sampling ranges (radians)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("blend", help="seam-blend a clip with its 180-degree-offset partner")
    p.add_argument("--input", required=True, help="0-degree clip manifest")
    p.add_argument("--rotated", required=True, help="180-degree clip manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_blend)

    p = sub.add_parser("weightmap", help="export the latitude loss-weight map")
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--delta", type=float, default=blendmod.DEFAULT_DELTA)
    p.add_argument("--out", required=True, help=".json for raw values, image file for a scaled map")
    p.set_defaults(func=cmd_weightmap)

    p = sub.add_parser("plan", help="print the window plan for long-clip processing")
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--window", type=int, default=25)
    p.add_argument("--context", type=int, default=5)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("sweep", help="unwrap a clip along a linear yaw sweep")
    p.add_argument("--input", required=True, help="equirect clip manifest")
    p.add_argument("--from-yaw", dest="from_yaw", type=float, default=45.0, help="degrees")
    p.add_argument("--to-yaw", dest="to_yaw", type=float, default=-45.0, help="degrees")
    _add_fov_args(p)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("filter", help="run the dataset filtering pipeline over a corpus")
    p.add_argument("--corpus", required=True, help="corpus manifest")
    p.add_argument("--config", default=None, help="filter config overrides (JSON)")
    p.add_argument("--out", required=True, help="verdicts output file")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("metric", help="quality metrics")
    msub = p.add_subparsers(dest="metric", required=True)

    mp = msub.add_parser("psnr", help="masked PSNR between two equirect clips")
    mp.add_argument("--gt", required=True, help="ground-truth clip manifest (mask source)")
    mp.add_argument("--pred", required=True)
    mp.add_argument("--out", default=None)
    mp.set_defaults(func=cmd_metric_psnr)

    ml = msub.add_parser("line", help="line consistency of a generated panorama")
    ml.add_argument("--pano", required=True, help="equirect clip manifest")
    ml.add_argument("--input-view", dest="input_view", required=True, help="annotated view PNG")
    ml.add_argument("--annotations", required=True)
    ml.add_argument("--neighbors", default="0", help="comma-separated yaw angles, degrees")
    _add_fov_args(ml)
    ml.add_argument("--min-score", dest="min_score", type=float, default=0.3)
    ml.add_argument("--min-segment-length", dest="min_segment_length", type=float, default=25.0)
    ml.add_argument("--out", default=None)
    ml.set_defaults(func=cmd_metric_line)

    p = sub.add_parser("serve", help="serve clips, unwraps, and annotations over HTTP")
    p.add_argument("--root", required=True, help="corpus directory (one clip per subdirectory)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8360)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
