/**
 * Browser viewer/annotator. Drag to look around, scroll to zoom, scrub
 * frames, draw line segments in annotate mode and save them to the service.
 * Rendering is client-side; the debug toggle fetches the server unwrap for
 * the same parameters and reports the maximum per-channel difference.
 */

import { ApiClient, ClipInfo } from "./api.js";
import { buildAnnotationDoc, canvasSegmentToImage, DraftSegment } from "./annotate.js";
import { EquirectImage, renderView } from "./geometry.js";
import {
  applyDrag,
  applyScroll,
  derivedVfovDeg,
  initialState,
  setFrame,
  ViewState,
} from "./viewstate.js";

const CANVAS_W = 640;
const CANVAS_H = 480;

class ViewerApp {
  private api = new ApiClient("");
  private state: ViewState = initialState(CANVAS_W, CANVAS_H);
  private stateRevision = 0; // stale async responses are discarded by revision
  private clips: ClipInfo[] = [];
  private frames = new Map<string, EquirectImage>();
  private drafts: DraftSegment[] = [];
  private annotateMode = false;
  private dragStart: { x: number; y: number } | null = null;

  private canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D;
  private clipSelect: HTMLSelectElement;
  private scrubber: HTMLInputElement;
  private status: HTMLElement;

  constructor(root: HTMLElement) {
    root.innerHTML = `
      <div class="toolbar">
        <select id="clip"></select>
        <input id="scrub" type="range" min="0" max="0" value="0">
        <label><input id="annotate" type="checkbox"> annotate</label>
        <button id="save" disabled>save annotations</button>
        <button id="debug">check vs server</button>
        <span id="status"></span>
      </div>
      <canvas id="view" width="${CANVAS_W}" height="${CANVAS_H}"></canvas>
    `;
    this.canvas = root.querySelector("#view") as HTMLCanvasElement;
    this.ctx = this.canvas.getContext("2d")!;
    this.clipSelect = root.querySelector("#clip") as HTMLSelectElement;
    this.scrubber = root.querySelector("#scrub") as HTMLInputElement;
    this.status = root.querySelector("#status") as HTMLElement;

    this.clipSelect.addEventListener("change", () => this.selectClip(this.clipSelect.value));
    this.scrubber.addEventListener("input", () => {
      const clip = this.currentClip();
      if (clip) this.update(setFrame(this.state, Number(this.scrubber.value), clip.frame_count));
    });
    (root.querySelector("#annotate") as HTMLInputElement).addEventListener("change", (e) => {
      this.annotateMode = (e.target as HTMLInputElement).checked;
    });
    (root.querySelector("#save") as HTMLButtonElement).addEventListener("click", () => {
      void this.saveAnnotations();
    });
    (root.querySelector("#debug") as HTMLButtonElement).addEventListener("click", () => {
      void this.compareWithServer();
    });

    this.canvas.addEventListener("mousedown", (e) => {
      this.dragStart = { x: e.offsetX, y: e.offsetY };
    });
    this.canvas.addEventListener("mousemove", (e) => {
      if (!this.dragStart || this.annotateMode) return;
      this.update(applyDrag(this.state, e.offsetX - this.dragStart.x, e.offsetY - this.dragStart.y));
      this.dragStart = { x: e.offsetX, y: e.offsetY };
    });
    this.canvas.addEventListener("mouseup", (e) => {
      if (this.dragStart && this.annotateMode) {
        const seg: DraftSegment = {
          x1: this.dragStart.x, y1: this.dragStart.y,
          x2: e.offsetX, y2: e.offsetY,
          label: `line-${this.drafts.length}`,
        };
        if (Math.hypot(seg.x2 - seg.x1, seg.y2 - seg.y1) > 3) {
          this.drafts.push(seg);
          (root.querySelector("#save") as HTMLButtonElement).disabled = false;
          this.paint();
        }
      }
      this.dragStart = null;
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.update(applyScroll(this.state, e.deltaY));
    });

    void this.start();
  }

  private currentClip(): ClipInfo | undefined {
    return this.clips.find((c) => c.id === this.state.clipId);
  }

  private async start(): Promise<void> {
    try {
      this.clips = await this.api.listClips();
    } catch (err) {
      this.status.textContent = `cannot reach service: ${err}`;
      return;
    }
    this.clipSelect.innerHTML = this.clips
      .map((c) => `<option value="${c.id}">${c.id} (${c.frame_count}f)</option>`)
      .join("");
    if (this.clips.length > 0) await this.selectClip(this.clips[0].id);
  }

  private async selectClip(clipId: string): Promise<void> {
    const clip = this.clips.find((c) => c.id === clipId);
    if (!clip) return;
    this.drafts = [];
    this.scrubber.max = String(clip.frame_count - 1);
    this.update({ ...this.state, clipId, frame: 0 });
  }

  private update(next: ViewState): void {
    this.state = next;
    this.stateRevision += 1;
    void this.render(this.stateRevision);
  }

  private async loadFrame(clipId: string, frame: number): Promise<EquirectImage> {
    const key = `${clipId}/${frame}`;
    const cached = this.frames.get(key);
    if (cached) return cached;
    const resp = await fetch(this.api.frameUrl(clipId, frame));
    if (!resp.ok) throw new Error(`frame fetch failed: ${resp.status}`);
    const bitmap = await createImageBitmap(await resp.blob());
    const off = document.createElement("canvas");
    off.width = bitmap.width;
    off.height = bitmap.height;
    const octx = off.getContext("2d")!;
    octx.drawImage(bitmap, 0, 0);
    const data = octx.getImageData(0, 0, bitmap.width, bitmap.height);
    const img: EquirectImage = { width: data.width, height: data.height, data: data.data };
    this.frames.set(key, img);
    return img;
  }

  private async render(revision: number): Promise<void> {
    const clipId = this.state.clipId;
    if (clipId === null) return;
    let pano: EquirectImage;
    try {
      pano = await this.loadFrame(clipId, this.state.frame);
    } catch (err) {
      this.status.textContent = String(err);
      return;
    }
    if (revision !== this.stateRevision) return; // stale
    const pixels = renderView(pano, {
      yawDeg: this.state.yawDeg,
      pitchDeg: this.state.pitchDeg,
      rollDeg: 0,
      hfovDeg: this.state.hfovDeg,
      vfovDeg: derivedVfovDeg(this.state),
      width: CANVAS_W,
      height: CANVAS_H,
    });
    this.ctx.putImageData(new ImageData(new Uint8ClampedArray(pixels), CANVAS_W, CANVAS_H), 0, 0);
    this.paintOverlay();
    this.status.textContent =
      `${clipId} f${this.state.frame} yaw=${this.state.yawDeg.toFixed(1)} ` +
      `pitch=${this.state.pitchDeg.toFixed(1)} hfov=${this.state.hfovDeg.toFixed(1)}`;
  }

  private paint(): void {
    void this.render(this.stateRevision);
  }

  private paintOverlay(): void {
    this.ctx.strokeStyle = "#ff3333";
    this.ctx.lineWidth = 2;
    for (const s of this.drafts) {
      this.ctx.beginPath();
      this.ctx.moveTo(s.x1, s.y1);
      this.ctx.lineTo(s.x2, s.y2);
      this.ctx.stroke();
    }
  }

  private async saveAnnotations(): Promise<void> {
    const clipId = this.state.clipId;
    if (clipId === null || this.drafts.length === 0) return;
    const lines = this.drafts
      .map((s) => canvasSegmentToImage(s, CANVAS_W, CANVAS_H, CANVAS_W, CANVAS_H))
      .filter((l) => l !== null);
    const doc = buildAnnotationDoc(`${clipId}/frame_00000.png`, CANVAS_W, CANVAS_H, lines);
    try {
      const revision = await this.api.postAnnotations(clipId, doc);
      this.status.textContent = `saved annotations, revision ${revision}`;
    } catch (err) {
      this.status.textContent = String(err); // non-fatal
    }
  }

  private async compareWithServer(): Promise<void> {
    const clipId = this.state.clipId;
    if (clipId === null) return;
    try {
      const resp = await fetch(this.api.serverUnwrapUrl(clipId, {
        ...this.state, canvasWidth: CANVAS_W, canvasHeight: CANVAS_H,
      }));
      if (!resp.ok) throw new Error(`server unwrap failed: ${resp.status}`);
      const bitmap = await createImageBitmap(await resp.blob());
      const off = document.createElement("canvas");
      off.width = bitmap.width;
      off.height = bitmap.height;
      const octx = off.getContext("2d")!;
      octx.drawImage(bitmap, 0, 0);
      const server = octx.getImageData(0, 0, bitmap.width, bitmap.height).data;
      const mine = this.ctx.getImageData(0, 0, CANVAS_W, CANVAS_H).data;
      let maxDiff = 0;
      for (let i = 0; i < server.length; i += 4) {
        for (let c = 0; c < 3; c++) {
          maxDiff = Math.max(maxDiff, Math.abs(server[i + c] - mine[i + c]));
        }
      }
      this.status.textContent = `max per-channel difference vs server: ${maxDiff}/255`;
    } catch (err) {
      this.status.textContent = String(err); // non-fatal
    }
  }
}

const rootElement = document.getElementById("app");
if (rootElement) new ViewerApp(rootElement);
