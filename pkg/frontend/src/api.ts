/** REST client for the panokit service; the only backend this app talks to. */

import type { ViewState } from "./viewstate.js";
import { derivedVfovDeg } from "./viewstate.js";

export interface ClipInfo {
  id: string;
  frame_count: number;
  fps: number;
  kind: string;
  width: number;
  height: number;
}

export interface AnnotationLine {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  label: string;
}

export interface AnnotationDoc {
  schema: "annotations/1";
  image: string;
  width: number;
  height: number;
  lines: AnnotationLine[];
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async listClips(): Promise<ClipInfo[]> {
    const r = await fetch(`${this.baseUrl}/clips`);
    if (!r.ok) throw new Error(`list clips failed: ${r.status}`);
    const doc = await r.json();
    return doc.clips as ClipInfo[];
  }

  frameUrl(clipId: string, frame: number): string {
    return `${this.baseUrl}/clips/${encodeURIComponent(clipId)}/frames/${frame}`;
  }

  serverUnwrapUrl(clipId: string, s: ViewState): string {
    const q = new URLSearchParams({
      frame: String(s.frame),
      yaw: String(s.yawDeg),
      pitch: String(s.pitchDeg),
      roll: "0",
      hfov: String(s.hfovDeg),
      vfov: String(derivedVfovDeg(s)),
      w: String(s.canvasWidth),
      h: String(s.canvasHeight),
    });
    return `${this.baseUrl}/clips/${encodeURIComponent(clipId)}/unwrap?${q.toString()}`;
  }

  async fetchAnnotations(clipId: string): Promise<{ doc: AnnotationDoc; revision: number }> {
    const r = await fetch(`${this.baseUrl}/clips/${encodeURIComponent(clipId)}/annotations`);
    if (!r.ok) throw new Error(`fetch annotations failed: ${r.status}`);
    const revision = Number(r.headers.get("X-Annotation-Revision") ?? "0");
    return { doc: (await r.json()) as AnnotationDoc, revision };
  }

  async postAnnotations(clipId: string, doc: AnnotationDoc): Promise<number> {
    const r = await fetch(`${this.baseUrl}/clips/${encodeURIComponent(clipId)}/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (!r.ok) {
      const body = await r.text();
      throw new Error(`save failed (${r.status}): ${body}`);
    }
    return (await r.json()).revision as number;
  }
}
