// Editor view state and the pick context. The applicable-operation lists
// always come from the service; the client never derives them.

import type { PickCandidate, PickResponse } from "./api.js";

export type Mode =
  | "idle"
  | "sketch"
  | "place-block"
  | "dimension"
  | "pick-for-op";

const MODES: Mode[] = ["idle", "sketch", "place-block", "dimension", "pick-for-op"];

export class ViewState {
  private activeMode: Mode = "idle";
  projectionName = "isometric";
  zoom = 1.0;
  panX = 0;
  panY = 0;
  visibility: Record<string, boolean> = {};

  get mode(): Mode {
    return this.activeMode;
  }

  setMode(mode: Mode): void {
    if (!MODES.includes(mode)) {
      throw new Error(`unknown mode ${mode}`);
    }
    this.activeMode = mode; // one assignment, so exactly one mode is active
  }

  modeFlags(): Record<Mode, boolean> {
    const flags = {} as Record<Mode, boolean>;
    for (const m of MODES) flags[m] = m === this.activeMode;
    return flags;
  }
}

export interface Selection {
  kind: string;
  id: number;
  sub: string;
}

export class PickContext {
  hovered: PickCandidate[] = [];
  selected: Selection | null = null;
  applicableOps: string[] = [];

  /** Replace the context from a service /pick payload. */
  updateFromService(response: PickResponse): void {
    this.hovered = response.candidates;
    const first = response.candidates.find((c) => c.kind !== "pipe_end") ??
      response.candidates[0] ?? null;
    if (first === null) {
      this.selected = null;
      this.applicableOps = [];
      return;
    }
    this.selected = { kind: first.kind, id: first.id, sub: first.sub };
    this.applicableOps = response.ops[`${first.kind}:${first.id}`] ?? [];
  }

  clear(): void {
    this.hovered = [];
    this.selected = null;
    this.applicableOps = [];
  }
}
