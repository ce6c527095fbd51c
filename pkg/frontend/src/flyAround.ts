// Fly-around player: one projection frame per Enter press, one render fetch
// per frame. Esc exits leaving the view at the current frame; the player
// closes by itself once the step count is exhausted.

import type { ApiClient, ProjectionFrame } from "./api.js";

export type FrameSink = (svg: string, frame: ProjectionFrame) => void;

export class FlyAroundPlayer {
  private frames: ProjectionFrame[] = [];
  private idx = 0;
  private open = false;

  constructor(
    private readonly api: ApiClient,
    private readonly sink: FrameSink,
  ) {}

  get isOpen(): boolean {
    return this.open;
  }

  get frameIndex(): number {
    return this.idx;
  }

  currentFrame(): ProjectionFrame | null {
    return this.open ? this.frames[this.idx] : null;
  }

  async start(step: number, n: number): Promise<void> {
    const { frames } = await this.api.flyAround(step, n);
    this.frames = frames;
    this.idx = 0;
    this.open = true;
    await this.show();
  }

  /** Enter: advance one frame; closes after the last one. */
  async advance(): Promise<void> {
    if (!this.open) return;
    if (this.idx + 1 >= this.frames.length) {
      this.open = false;
      return;
    }
    this.idx += 1;
    await this.show();
  }

  /** Esc: exit, view stays at the current frame. */
  exit(): ProjectionFrame | null {
    if (!this.open) return null;
    const frame = this.frames[this.idx];
    this.open = false;
    return frame;
  }

  private async show(): Promise<void> {
    const frame = this.frames[this.idx];
    const svg = await this.api.renderSvg({ frame });
    this.sink(svg, frame);
  }
}
