import { describe, expect, it } from "vitest";

import { buildAnnotationDoc, canvasSegmentToImage, clipSegmentToRect } from "../src/annotate.js";

describe("clipSegmentToRect", () => {
  it("keeps fully inside segments", () => {
    expect(clipSegmentToRect(10, 10, 50, 40, 100, 100)).toEqual([10, 10, 50, 40]);
  });

  it("clips a segment leaving the right edge", () => {
    const out = clipSegmentToRect(90, 50, 150, 50, 100, 100)!;
    expect(out[0]).toBe(90);
    expect(out[2]).toBeCloseTo(100, 12);
    expect(out[3]).toBe(50);
  });

  it("drops fully outside segments", () => {
    expect(clipSegmentToRect(200, 200, 300, 300, 100, 100)).toBeNull();
  });

  it("drops segments that graze a corner to zero length", () => {
    expect(clipSegmentToRect(-10, 10, 10, -10, 100, 100)).toBeNull();
  });
});

describe("canvasSegmentToImage", () => {
  it("scales canvas to image coordinates", () => {
    const line = canvasSegmentToImage(
      { x1: 0, y1: 0, x2: 320, y2: 240, label: "d" }, 640, 480, 320, 240,
    )!;
    expect(line.x1).toBe(0);
    expect(line.x2).toBeCloseTo(160, 12);
    expect(line.y2).toBeCloseTo(120, 12);
  });

  it("is the identity at matching dimensions", () => {
    const line = canvasSegmentToImage(
      { x1: 12, y1: 34, x2: 300, y2: 200, label: "" }, 640, 480, 640, 480,
    )!;
    expect([line.x1, line.y1, line.x2, line.y2]).toEqual([12, 34, 300, 200]);
  });

  it("clips off-canvas parts before save", () => {
    const line = canvasSegmentToImage(
      { x1: -50, y1: 100, x2: 700, y2: 100, label: "wide" }, 640, 480, 640, 480,
    )!;
    expect(line.x1).toBe(0);
    expect(line.x2).toBe(640);
  });

  it("returns null for segments entirely outside", () => {
    expect(
      canvasSegmentToImage({ x1: -10, y1: -10, x2: -5, y2: -20, label: "" }, 640, 480, 640, 480),
    ).toBeNull();
  });
});

describe("buildAnnotationDoc", () => {
  it("produces an annotations/1 document", () => {
    const doc = buildAnnotationDoc("clip/frame_00000.png", 320, 240, [
      { x1: 1, y1: 2, x2: 3, y2: 4, label: "lane" },
    ]);
    expect(doc.schema).toBe("annotations/1");
    expect(doc.width).toBe(320);
    expect(doc.lines).toHaveLength(1);
  });
});
