// Convert a 2D cursor position into a 3D point by decomposing the paper
// delta from an anchor onto the two projected axis directions it hugs
// closest, so cursor moves always produce axis-aligned model moves.

import type { ProjectionFrame } from "./api.js";

export type Vec2 = [number, number];
export type Point3 = [number, number, number];

interface AxisImage {
  axis: 0 | 1 | 2;
  sign: 1 | -1;
  image: Vec2;
}

function norm(v: Vec2): number {
  return Math.hypot(v[0], v[1]);
}

function axisImages(proj: ProjectionFrame): AxisImage[] {
  const bases: Vec2[] = [proj.ex, proj.ey, proj.ez];
  const out: AxisImage[] = [];
  bases.forEach((e, axis) => {
    if (norm(e) < 1e-12) return;
    for (const sign of [1, -1] as const) {
      out.push({
        axis: axis as 0 | 1 | 2,
        sign,
        image: [e[0] * sign, e[1] * sign],
      });
    }
  });
  return out;
}

function alignment(delta: Vec2, image: Vec2): number {
  const d = norm(delta) * norm(image);
  if (d === 0) return -Infinity;
  return (delta[0] * image[0] + delta[1] * image[1]) / d;
}

/**
 * Anchor-relative cursor pick: the paper delta decomposes onto the two
 * best-aligned, non-collinear projected axis directions; the result is the
 * anchor moved by those two axis components. A zero drag returns the anchor.
 */
export function inputPlanePick(
  anchor: Point3,
  anchorPaper: Vec2,
  cursor: Vec2,
  proj: ProjectionFrame,
): Point3 {
  const delta: Vec2 = [cursor[0] - anchorPaper[0], cursor[1] - anchorPaper[1]];
  if (norm(delta) < 1e-9) {
    return [...anchor];
  }
  const candidates = axisImages(proj).sort(
    (a, b) => alignment(delta, b.image) - alignment(delta, a.image),
  );
  const first = candidates[0];
  let second: AxisImage | undefined;
  for (const c of candidates.slice(1)) {
    const cross = first.image[0] * c.image[1] - first.image[1] * c.image[0];
    if (c.axis !== first.axis && Math.abs(cross) > 1e-9) {
      second = c;
      break;
    }
  }
  if (!second) {
    // degenerate projection frame: fall back to the dominant axis only
    const t =
      (delta[0] * first.image[0] + delta[1] * first.image[1]) /
      (norm(first.image) ** 2);
    return movedAlong(anchor, first, t);
  }
  // solve delta = a*first.image + b*second.image
  const det =
    first.image[0] * second.image[1] - first.image[1] * second.image[0];
  const a =
    (delta[0] * second.image[1] - delta[1] * second.image[0]) / det;
  const b =
    (first.image[0] * delta[1] - first.image[1] * delta[0]) / det;
  let out = movedAlong(anchor, first, a);
  out = movedAlong(out, second, b);
  return out;
}

function movedAlong(p: Point3, dir: AxisImage, amount: number): Point3 {
  const next: Point3 = [...p];
  next[dir.axis] += dir.sign * amount;
  return next;
}

/** Snap tiny secondary components away so exact-axis drags stay axis pure. */
export function dominantAxisMove(
  anchor: Point3,
  target: Point3,
  tolerance = 1e-6,
): Point3 {
  const delta = [
    target[0] - anchor[0],
    target[1] - anchor[1],
    target[2] - anchor[2],
  ];
  let best = 0;
  for (let i = 1; i < 3; i++) {
    if (Math.abs(delta[i]) > Math.abs(delta[best])) best = i;
  }
  const out: Point3 = [...anchor];
  if (Math.abs(delta[best]) > tolerance) {
    out[best] += delta[best];
  }
  return out;
}
