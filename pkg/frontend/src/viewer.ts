// SVG viewer: fetch the drawing, keep zoom/pan as a CSS transform, convert
// client clicks back into drawing millimeters via the viewBox.

import type { ApiClient, ProjectionFrame } from "./api.js";
import type { ViewState } from "./state.js";

export class SchemeViewer {
  private viewBox: [number, number, number, number] | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private readonly state: ViewState,
  ) {}

  async refresh(opts: { token?: string; frame?: ProjectionFrame } = {}): Promise<void> {
    const svg = await this.api.renderSvg({
      projection: this.state.projectionName,
      token: opts.token,
      frame: opts.frame,
    });
    this.showSvg(svg);
  }

  showSvg(svg: string): void {
    this.container.innerHTML = svg;
    const el = this.container.querySelector("svg");
    if (el) {
      const vb = el.getAttribute("viewBox");
      if (vb) {
        const [x, y, w, h] = vb.split(/\s+/).map(Number);
        this.viewBox = [x, y, w, h];
      }
      this.applyTransform();
    }
  }

  applyTransform(): void {
    const el = this.container.querySelector("svg");
    if (!el) return;
    el.style.transform =
      `translate(${this.state.panX}px, ${this.state.panY}px) ` +
      `scale(${this.state.zoom})`;
    el.style.transformOrigin = "center center";
  }

  zoomBy(factor: number): void {
    this.state.zoom = Math.min(50, Math.max(0.02, this.state.zoom * factor));
    this.applyTransform();
  }

  panBy(dx: number, dy: number): void {
    this.state.panX += dx;
    this.state.panY += dy;
    this.applyTransform();
  }

  /** Client pixel position -> drawing mm (SVG y is flipped back to model). */
  clientToPaper(clientX: number, clientY: number): [number, number] | null {
    const el = this.container.querySelector("svg");
    if (!el || !this.viewBox) return null;
    const rect = el.getBoundingClientRect();
    if (rect.width === 0 || rect.height === 0) return null;
    const [vx, vy, vw, vh] = this.viewBox;
    const fx = (clientX - rect.left) / rect.width;
    const fy = (clientY - rect.top) / rect.height;
    const sx = vx + fx * vw;
    const sy = vy + fy * vh;
    return [sx, -sy];
  }
}
