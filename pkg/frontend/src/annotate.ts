/**
 * Draft line annotations on the rendered view. Segments live in canvas
 * coordinates while being drawn and convert to image pixel coordinates of
 * the current view on save (clipped to the image rectangle first).
 */

import type { AnnotationDoc, AnnotationLine } from "./api.js";

export interface DraftSegment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  label: string;
}

/** Liang-Barsky clip of a segment against [0, w] x [0, h]; null if outside. */
export function clipSegmentToRect(
  x1: number, y1: number, x2: number, y2: number, w: number, h: number,
): [number, number, number, number] | null {
  const dx = x2 - x1;
  const dy = y2 - y1;
  let t0 = 0;
  let t1 = 1;
  const edges: Array<[number, number]> = [
    [-dx, x1],
    [dx, w - x1],
    [-dy, y1],
    [dy, h - y1],
  ];
  for (const [p, q] of edges) {
    if (p === 0) {
      if (q < 0) return null;
      continue;
    }
    const r = q / p;
    if (p < 0) {
      if (r > t1) return null;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return null;
      if (r < t1) t1 = r;
    }
  }
  if (t0 >= t1) return null;
  const a: [number, number] = [x1 + t0 * dx, y1 + t0 * dy];
  const b: [number, number] = [x1 + t1 * dx, y1 + t1 * dy];
  if (Math.hypot(b[0] - a[0], b[1] - a[1]) < 1e-9) return null;
  return [a[0], a[1], b[0], b[1]];
}

/** Canvas -> image pixel coordinates (pure scaling) plus clipping. */
export function canvasSegmentToImage(
  seg: DraftSegment,
  canvasW: number,
  canvasH: number,
  imageW: number,
  imageH: number,
): AnnotationLine | null {
  const sx = imageW / canvasW;
  const sy = imageH / canvasH;
  const clipped = clipSegmentToRect(
    seg.x1 * sx, seg.y1 * sy, seg.x2 * sx, seg.y2 * sy, imageW, imageH,
  );
  if (clipped === null) return null;
  const [x1, y1, x2, y2] = clipped;
  return { x1, y1, x2, y2, label: seg.label };
}

export function buildAnnotationDoc(
  imageRef: string,
  imageW: number,
  imageH: number,
  lines: AnnotationLine[],
): AnnotationDoc {
  return { schema: "annotations/1", image: imageRef, width: imageW, height: imageH, lines };
}
