/**
 * Client-side unwrap math, same contract as the server:
 * camera frame +X forward / +Y right / +Z up, rotations composed as
 * R_yaw * R_pitch * R_roll, longitude theta = atan2(Y, X), latitude
 * phi = asin(Z), equirect u = W*(theta+pi)/(2pi), v = H*(pi/2-phi)/pi,
 * texel centers at integer coordinates, horizontal wrap, vertical clamp.
 */

export type Mat3 = Float64Array; // row-major 3x3

export interface EquirectImage {
  width: number;
  height: number;
  /** RGBA bytes, stride 4; alpha carries the validity mask. */
  data: Uint8ClampedArray | Buffer;
}

export interface RenderParams {
  yawDeg: number;
  pitchDeg: number;
  rollDeg: number;
  hfovDeg: number;
  vfovDeg: number;
  width: number;
  height: number;
}

const DEG = Math.PI / 180;

export function rotationFromPose(rollRad: number, pitchRad: number, yawRad: number): Mat3 {
  const cr = Math.cos(rollRad), sr = Math.sin(rollRad);
  const cp = Math.cos(pitchRad), sp = Math.sin(pitchRad);
  const cy = Math.cos(yawRad), sy = Math.sin(yawRad);
  // R_y * R_p * R_r, written out
  return new Float64Array([
    cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
    sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
    -sp, cp * sr, cp * cr,
  ]);
}

export function applyMat3(m: Mat3, x: number, y: number, z: number): [number, number, number] {
  return [
    m[0] * x + m[1] * y + m[2] * z,
    m[3] * x + m[4] * y + m[5] * z,
    m[6] * x + m[7] * y + m[8] * z,
  ];
}

export function pixelToNdc(u: number, v: number, width: number, height: number): [number, number] {
  return [(2 * u) / width - 1, (2 * v) / height - 1];
}

/** Camera-frame ray through an NDC point (not normalized; angles don't need it). */
export function cameraRay(xNdc: number, yNdc: number, hfovRad: number, vfovRad: number): [number, number, number] {
  return [1, xNdc * Math.tan(hfovRad / 2), -yNdc * Math.tan(vfovRad / 2)];
}

export function dirToEquirect(
  x: number, y: number, z: number, wEq: number, hEq: number,
): [number, number] {
  const theta = Math.atan2(y, x);
  const norm = Math.sqrt(x * x + y * y + z * z);
  const phi = Math.asin(Math.max(-1, Math.min(1, z / norm)));
  return [(wEq * (theta + Math.PI)) / (2 * Math.PI), (hEq * (Math.PI / 2 - phi)) / Math.PI];
}

/** Bilinear RGB sample with horizontal wrap and vertical clamp; returns [0,1] channels. */
export function sampleBilinearWrapped(
  pano: EquirectImage, u: number, v: number,
): [number, number, number] {
  const w = pano.width, h = pano.height;
  let uu = u % w;
  if (uu < 0) uu += w;
  const vv = Math.max(0, Math.min(h - 1, v));
  const u0 = Math.floor(uu);
  const v0 = Math.floor(vv);
  const fu = uu - u0;
  const fv = vv - v0;
  const u1 = (u0 + 1) % w;
  const v1 = Math.min(v0 + 1, h - 1);
  const d = pano.data;
  const out: [number, number, number] = [0, 0, 0];
  for (let c = 0; c < 3; c++) {
    const p00 = d[(v0 * w + u0) * 4 + c] / 255;
    const p01 = d[(v0 * w + u1) * 4 + c] / 255;
    const p10 = d[(v1 * w + u0) * 4 + c] / 255;
    const p11 = d[(v1 * w + u1) * 4 + c] / 255;
    const top = p00 * (1 - fu) + p01 * fu;
    const bot = p10 * (1 - fu) + p11 * fu;
    out[c] = top * (1 - fv) + bot * fv;
  }
  return out;
}

/**
 * Pure unwrap render: same state and pano bytes always produce the same
 * pixels. Output is opaque RGBA.
 */
export function renderView(pano: EquirectImage, params: RenderParams): Uint8ClampedArray {
  const { width: w, height: h } = params;
  const rot = rotationFromPose(params.rollDeg * DEG, params.pitchDeg * DEG, params.yawDeg * DEG);
  const tanA = Math.tan((params.hfovDeg * DEG) / 2);
  const tanB = Math.tan((params.vfovDeg * DEG) / 2);
  const out = new Uint8ClampedArray(w * h * 4);
  let idx = 0;
  for (let row = 0; row < h; row++) {
    const yNdc = (2 * row) / h - 1;
    const rz = -yNdc * tanB;
    for (let col = 0; col < w; col++) {
      const xNdc = (2 * col) / w - 1;
      const ry = xNdc * tanA;
      const [wx, wy, wz] = applyMat3(rot, 1, ry, rz);
      const [ue, ve] = dirToEquirect(wx, wy, wz, pano.width, pano.height);
      const [r, g, b] = sampleBilinearWrapped(pano, ue, ve);
      out[idx++] = Math.round(Math.min(1, Math.max(0, r)) * 255);
      out[idx++] = Math.round(Math.min(1, Math.max(0, g)) * 255);
      out[idx++] = Math.round(Math.min(1, Math.max(0, b)) * 255);
      out[idx++] = 255;
    }
  }
  return out;
}
