import { describe, expect, it } from "vitest";

import {
  applyDrag,
  applyScroll,
  derivedVfovDeg,
  HFOV_MAX_DEG,
  HFOV_MIN_DEG,
  initialState,
  PITCH_LIMIT_DEG,
  setFrame,
  ViewState,
} from "../src/viewstate.js";

function inBounds(s: ViewState): boolean {
  return (
    s.pitchDeg >= -PITCH_LIMIT_DEG &&
    s.pitchDeg <= PITCH_LIMIT_DEG &&
    s.hfovDeg >= HFOV_MIN_DEG &&
    s.hfovDeg <= HFOV_MAX_DEG &&
    s.yawDeg >= -180 &&
    s.yawDeg < 180
  );
}

describe("control laws", () => {
  it("drag changes yaw by dx * hfov / canvasWidth degrees", () => {
    const s = initialState(640, 480);
    const dragged = applyDrag(s, 64, 0);
    expect(Math.abs(dragged.yawDeg - s.yawDeg)).toBeCloseTo((64 * s.hfovDeg) / 640, 12);
  });

  it("drag moves pitch at the same angular scale", () => {
    const s = initialState(640, 480);
    const dragged = applyDrag(s, 0, -32);
    expect(Math.abs(dragged.pitchDeg - s.pitchDeg)).toBeCloseTo((32 * s.hfovDeg) / 640, 12);
  });

  it("scroll scales hfov multiplicatively", () => {
    const s = initialState(640, 480);
    const zoomed = applyScroll(s, 100);
    expect(zoomed.hfovDeg).toBeCloseTo(s.hfovDeg * Math.exp(0.1), 12);
    const back = applyScroll(zoomed, -100);
    expect(back.hfovDeg).toBeCloseTo(s.hfovDeg, 9);
  });

  it("derived vfov follows square pixels", () => {
    const s = { ...initialState(640, 480), hfovDeg: 90 };
    const expected = (2 * Math.atan(Math.tan(Math.PI / 4) * (480 / 640)) * 180) / Math.PI;
    expect(derivedVfovDeg(s)).toBeCloseTo(expected, 12);
  });

  it("setFrame clamps to the clip range", () => {
    const s = initialState(640, 480);
    expect(setFrame(s, -3, 10).frame).toBe(0);
    expect(setFrame(s, 42, 10).frame).toBe(9);
    expect(setFrame(s, 4.6, 10).frame).toBe(5);
  });
});

describe("clamping invariants", () => {
  it("no event sequence escapes the clamps", () => {
    let seed = 77;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    let s = initialState(640, 480);
    for (let i = 0; i < 2000; i++) {
      const which = rand();
      if (which < 0.4) {
        s = applyDrag(s, (rand() - 0.5) * 4000, (rand() - 0.5) * 4000);
      } else if (which < 0.8) {
        s = applyScroll(s, (rand() - 0.5) * 10000);
      } else {
        s = setFrame(s, Math.floor(rand() * 100) - 20, 25);
      }
      expect(inBounds(s)).toBe(true);
      expect(s.frame).toBeGreaterThanOrEqual(0);
      expect(s.frame).toBeLessThan(25);
    }
  });

  it("pitch saturates at the limit", () => {
    let s = initialState(640, 480);
    for (let i = 0; i < 50; i++) s = applyDrag(s, 0, 10_000);
    expect(s.pitchDeg).toBe(-PITCH_LIMIT_DEG);
    for (let i = 0; i < 100; i++) s = applyDrag(s, 0, -10_000);
    expect(s.pitchDeg).toBe(PITCH_LIMIT_DEG);
  });

  it("transitions are pure (input state untouched)", () => {
    const s = initialState(640, 480);
    const frozen = JSON.stringify(s);
    applyDrag(s, 100, 50);
    applyScroll(s, 300);
    setFrame(s, 3, 10);
    expect(JSON.stringify(s)).toBe(frozen);
  });
});
