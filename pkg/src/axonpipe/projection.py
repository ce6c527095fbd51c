"""Axonometric 3D-to-2D projection, input orthogonalization/snapping and the
fly-around view sequence.

A projection is given by three free 2D images of the model axes, so presets
and fly-around rotation are handled uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadStep
from .geometry import (
    AxisDir,
    Point3,
    Vec2,
    v2_add,
    v2_cross,
    v2_scale,
)

# Paper-space length of one axes-glyph arrow, mm.
GLYPH_ARROW_LEN = 10.0


@dataclass(frozen=True)
class Projection:
    """Images of the three model axes on paper (mm paper per mm model)."""

    ex: Vec2
    ey: Vec2
    ez: Vec2
    name: str = "custom"

    def __post_init__(self):
        for a, b in (("ex", "ey"), ("ey", "ez"), ("ex", "ez")):
            va, vb = getattr(self, a), getattr(self, b)
            if abs(v2_cross(va, vb)) <= 1e-12:
                raise ValueError(f"projection axes {a} and {b} are collinear")

    def to_dict(self) -> dict:
        return {
            "ex": list(self.ex), "ey": list(self.ey), "ez": list(self.ez),
            "name": self.name,
        }

    @staticmethod
    def from_dict(d: dict) -> "Projection":
        return Projection(
            ex=tuple(d["ex"]), ey=tuple(d["ey"]), ez=tuple(d["ez"]),
            name=d.get("name", "custom"),
        )


def _deg(a: float) -> tuple[float, float]:
    r = math.radians(a)
    return (math.cos(r), math.sin(r))


ISOMETRIC = Projection(ex=_deg(210.0), ey=_deg(-30.0), ez=(0.0, 1.0), name="isometric")
FRONTAL_DIMETRIC = Projection(
    ex=(-0.5 * math.cos(math.radians(45.0)), -0.5 * math.sin(math.radians(45.0))),
    ey=(1.0, 0.0),
    ez=(0.0, 1.0),
    name="frontal_dimetric",
)

PRESETS: dict[str, Projection] = {
    p.name: p for p in (ISOMETRIC, FRONTAL_DIMETRIC)
}


def preset(name: str) -> Projection:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown projection preset {name!r}") from None


def project(p: Point3, proj: Projection) -> Vec2:
    """Paper image of a model point: x*ex + y*ey + z*ez."""
    return v2_add(
        v2_add(v2_scale(proj.ex, p.x), v2_scale(proj.ey, p.y)),
        v2_scale(proj.ez, p.z),
    )


def orthogonalize(prev: Point3, raw: Point3) -> Point3:
    """Snap raw onto the dominant model axis through prev.

    The axis whose delta component has the largest magnitude wins; ties break
    X before Y before Z.
    """
    d = raw - prev
    comps = (d.x, d.y, d.z)
    best = 0
    for i in (1, 2):
        if abs(comps[i]) > abs(comps[best]):
            best = i
    return prev + Point3(0.0, 0.0, 0.0).with_component(best, comps[best])


def axis_dir_of(delta: Point3) -> AxisDir:
    """Signed axis direction of an axis-aligned delta (dominant component)."""
    comps = (delta.x, delta.y, delta.z)
    best = 0
    for i in (1, 2):
        if abs(comps[i]) > abs(comps[best]):
            best = i
    sign = "+" if comps[best] >= 0 else "-"
    return AxisDir(f"{sign}{'xyz'[best]}")


def snap(scheme, raw: Point3, radius: float) -> Point3:
    """Nearest existing scheme point within radius (3D), else raw unchanged.

    Candidate points are pipe ends and block attachment points; equidistant
    candidates resolve to the lowest object id.
    """
    if radius <= 0:
        raise ValueError("snap radius must be positive")
    best: tuple[float, int, Point3] | None = None
    for pid in sorted(scheme.pipes):
        pipe = scheme.pipes[pid]
        for pt in (pipe.a, pipe.b):
            d = raw.dist(pt)
            if d <= radius and (best is None or d < best[0] - 1e-12):
                best = (d, pid, pt)
    for bid in sorted(scheme.blocks):
        block = scheme.blocks[bid]
        for pt in block.attachment_points(scheme):
            d = raw.dist(pt)
            if d <= radius and (best is None or d < best[0] - 1e-12):
                best = (d, bid, pt)
    return best[2] if best is not None else raw


def _view_frame(ex: Vec2, ey: Vec2, ez: Vec2, name: str) -> Projection:
    """Projection without axis validation: rotation sweeps may legitimately
    pass through poses where two axis images align."""
    p = object.__new__(Projection)
    object.__setattr__(p, "ex", ex)
    object.__setattr__(p, "ey", ey)
    object.__setattr__(p, "ez", ez)
    object.__setattr__(p, "name", name)
    return p


def rotated_about_z(proj: Projection, angle_deg: float) -> Projection:
    """Projection equivalent to viewing the model rotated by angle about Z."""
    r = math.radians(angle_deg)
    c, s = math.cos(r), math.sin(r)
    # project(R(-angle) p) decomposed back onto (x, y, z)
    ex = v2_add(v2_scale(proj.ex, c), v2_scale(proj.ey, -s))
    ey = v2_add(v2_scale(proj.ex, s), v2_scale(proj.ey, c))
    return _view_frame(ex, ey, proj.ez, f"{proj.name}@{angle_deg:g}")


def fly_around(start: Projection, step_deg: float, n: int) -> list[Projection]:
    """Sequence of n+1 projections stepping around the model Z axis."""
    if step_deg == 0:
        raise BadStep("fly-around step must be nonzero")
    if n < 1:
        raise BadStep("fly-around needs at least one step")
    return [start] + [rotated_about_z(start, step_deg * k) for k in range(1, n + 1)]


@dataclass
class GlyphLine:
    start: Vec2
    end: Vec2
    label: str | None = None


def axes_glyph(proj: Projection) -> list[GlyphLine]:
    """Three labeled arrows from a common origin along the projected axes."""
    out: list[GlyphLine] = []
    for label, e in (("X", proj.ex), ("Y", proj.ey), ("Z", proj.ez)):
        tip = v2_scale(e, GLYPH_ARROW_LEN)
        out.append(GlyphLine(start=(0.0, 0.0), end=tip))
        out.append(GlyphLine(start=tip, end=tip, label=label))
    return out
