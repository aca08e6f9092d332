/**
 * Viewer state and its control laws. All transitions are pure and clamp
 * their result, so no event sequence can push the state out of bounds.
 *
 * Control laws (documented contract):
 *  - dragging by dx pixels changes yaw by dx * hfov / canvasWidth degrees
 *    (content follows the cursor); dy moves pitch at the same deg/px scale;
 *  - scrolling scales hfov multiplicatively by exp(deltaY * 0.001).
 */

export const PITCH_LIMIT_DEG = 89;
export const HFOV_MIN_DEG = 30;
export const HFOV_MAX_DEG = 120;

export interface ViewState {
  clipId: string | null;
  frame: number;
  yawDeg: number;
  pitchDeg: number;
  hfovDeg: number;
  canvasWidth: number;
  canvasHeight: number;
}

export function initialState(canvasWidth: number, canvasHeight: number): ViewState {
  return {
    clipId: null,
    frame: 0,
    yawDeg: 0,
    pitchDeg: 0,
    hfovDeg: 90,
    canvasWidth,
    canvasHeight,
  };
}

function wrapYaw(yawDeg: number): number {
  let y = ((yawDeg + 180) % 360 + 360) % 360 - 180;
  return y;
}

export function clampState(s: ViewState): ViewState {
  return {
    ...s,
    yawDeg: wrapYaw(s.yawDeg),
    pitchDeg: Math.max(-PITCH_LIMIT_DEG, Math.min(PITCH_LIMIT_DEG, s.pitchDeg)),
    hfovDeg: Math.max(HFOV_MIN_DEG, Math.min(HFOV_MAX_DEG, s.hfovDeg)),
    frame: Math.max(0, s.frame),
  };
}

export function applyDrag(s: ViewState, dxPx: number, dyPx: number): ViewState {
  const degPerPx = s.hfovDeg / s.canvasWidth;
  return clampState({
    ...s,
    yawDeg: s.yawDeg - dxPx * degPerPx,
    pitchDeg: s.pitchDeg - dyPx * degPerPx,
  });
}

export function applyScroll(s: ViewState, deltaY: number): ViewState {
  return clampState({ ...s, hfovDeg: s.hfovDeg * Math.exp(deltaY * 0.001) });
}

export function setFrame(s: ViewState, frame: number, frameCount: number): ViewState {
  return { ...s, frame: Math.max(0, Math.min(frameCount - 1, Math.round(frame))) };
}

/** Vertical FoV for square pixels at the canvas aspect. */
export function derivedVfovDeg(s: ViewState): number {
  const half = Math.atan(
    Math.tan((s.hfovDeg * Math.PI) / 360) * (s.canvasHeight / s.canvasWidth),
  );
  return (half * 2 * 180) / Math.PI;
}
