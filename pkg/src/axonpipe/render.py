"""Produce the 2D drawing: project the model, apply offsets and break lines,
subtract block cut intervals from pipe images, draw symbols, dimensions,
leaders, marks, the construction grid and the axes glyph.

Rendering is a pure function of a scheme snapshot and settings; model
coordinates are never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import StaleToken
from .geometry import (
    EPS,
    GLOBAL_AXES,
    Point3,
    Vec2,
    v2_add,
    v2_cross,
    v2_norm,
    v2_scale,
    v2_sub,
    v2_unit,
)
from .model import BlockInstance, OffsetSpec, Pipe, Scheme
from .projection import GLYPH_ARROW_LEN, Projection, project

DEFAULT_STROKES = {
    "pipe": 0.6,
    "block": 0.4,
    "dimension": 0.25,
    "leader": 0.25,
    "grid": 0.25,
    "glyph": 0.35,
    "construction": 0.3,
}

DEFAULT_TEXT_HEIGHT = 3.5   # mm

# Break-line glyph: two parallel strokes across the pipe image.
BREAK_STROKE_LEN = 3.0
BREAK_STROKE_ANGLE = math.radians(60.0)
BREAK_STROKE_SPACING = 1.5
BREAK_GAP = 2.0

GRID_BUBBLE_RADIUS = 4.0
ARC_SEGMENTS = 24


@dataclass
class RenderSettings:
    """Knobs for one rendering pass; None fields fall back to the scheme.

    ``projection`` (a full frame, e.g. from fly_around) wins over
    ``projection_name`` (a preset)."""

    projection_name: str | None = None
    projection: Projection | None = None
    visibility: dict[str, bool] = field(default_factory=dict)
    axes_glyph: bool = False
    floor_label: str | None = None
    strokes: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_STROKES))
    text_height: float = DEFAULT_TEXT_HEIGHT

    def __post_init__(self):
        if self.text_height <= 0 or any(w <= 0 for w in self.strokes.values()):
            raise ValueError("stroke widths and text height must be positive")


@dataclass
class Primitive:
    """One drawable element in paper mm. ``cls`` picks the line style."""

    kind: str                  # "line" | "polyline" | "text" | "arrow"
    cls: str                   # style class: pipe, block, dimension, ...
    points: list[Vec2] = field(default_factory=list)
    text: str = ""
    closed: bool = False
    filled: bool = False
    height: float = DEFAULT_TEXT_HEIGHT
    tag: str = ""              # free marker ("break", "axis", "bubble", ...)


@dataclass
class Drawable:
    primitives: list[Primitive] = field(default_factory=list)

    def add(self, prim: Primitive) -> None:
        self.primitives.append(prim)

    def by_class(self, cls: str) -> list[Primitive]:
        return [p for p in self.primitives if p.cls == cls]

    def by_tag(self, tag: str) -> list[Primitive]:
        return [p for p in self.primitives if p.tag == tag]


# ---------------------------------------------------------------------------
# offset displacement


def _offset_applies(scheme: Scheme, off: OffsetSpec, point: Point3,
                    owner_pipe: int | None, owner_t: float | None,
                    branch_cache: dict[int, set[int]]) -> bool:
    if off.kind == "local":
        if off.scope_pipe not in scheme.pipes:
            return False
        if off.scope_pipe not in branch_cache:
            from .editops import branch_of
            branch_cache[off.scope_pipe] = branch_of(scheme, off.scope_pipe)
        if owner_pipe is None or owner_pipe not in branch_cache[off.scope_pipe]:
            return False
    if owner_pipe is not None and owner_t is not None:
        for bp, bt in off.broken:
            if bp == owner_pipe:
                # a declared break splits this pipe at bt instead of the plane
                side_b = _halfspace_side(scheme, off, scheme.pipes[bp].b)
                on_b_side = owner_t > bt
                return on_b_side if side_b > 0 else not on_b_side
    return _halfspace_side(scheme, off, point) > 0


def _halfspace_side(scheme: Scheme, off: OffsetSpec, point: Point3) -> float:
    rel = (point - off.anchor_point(scheme)).dot(off.plane_normal(scheme))
    return rel if abs(rel) > 1e-9 else 0.0


def paper_displacement(scheme: Scheme, point: Point3,
                       owner_pipe: int | None = None,
                       owner_t: float | None = None,
                       owner_block: int | None = None,
                       branch_cache: dict | None = None) -> Vec2:
    """Total offset shift applying to a model point owned by a pipe/block."""
    if branch_cache is None:
        branch_cache = {}
    if owner_block is not None and owner_pipe is None:
        block = scheme.blocks.get(owner_block)
        if block is not None and block.attachments:
            owner_pipe = block.attachments[0]
    total = (0.0, 0.0)
    for oid in sorted(scheme.offsets):
        off = scheme.offsets[oid]
        if off.anchor_pipe not in scheme.pipes:
            continue
        if _offset_applies(scheme, off, point, owner_pipe, owner_t, branch_cache):
            total = v2_add(total, off.shift)
    return total


def projected_point(scheme: Scheme, point: Point3, proj: Projection,
                    owner_pipe: int | None = None, owner_t: float | None = None,
                    owner_block: int | None = None,
                    branch_cache: dict | None = None) -> Vec2:
    """Paper image of a model point: projection, offsets, sheet placement."""
    img = project(point, proj)
    img = v2_add(img, paper_displacement(scheme, point, owner_pipe, owner_t,
                                         owner_block, branch_cache))
    return v2_add(img, scheme.settings.placement)


# ---------------------------------------------------------------------------
# pipe images


def _visible_param_intervals(scheme: Scheme, pipe: Pipe) -> list[tuple[float, float]]:
    """[0,1] minus the pipe's cut intervals, ascending."""
    cuts = sorted(iv for b in scheme.blocks.values()
                  for p, iv in b.cut_intervals.items() if p == pipe.id)
    out: list[tuple[float, float]] = []
    cursor = 0.0
    for c0, c1 in cuts:
        if c0 - cursor > 1e-12:
            out.append((cursor, c0))
        cursor = max(cursor, c1)
    if 1.0 - cursor > 1e-12:
        out.append((cursor, 1.0))
    return out


def _offset_split_params(scheme: Scheme, pipe: Pipe,
                         branch_cache: dict) -> list[tuple[float, bool]]:
    """Parameters where the pipe image splits: (t, is_declared_break)."""
    splits: list[tuple[float, bool]] = []
    for oid in sorted(scheme.offsets):
        off = scheme.offsets[oid]
        if off.anchor_pipe not in scheme.pipes:
            continue
        declared = [t for p, t in off.broken if p == pipe.id]
        if declared:
            splits += [(t, True) for t in declared]
            continue
        if off.kind == "local":
            if off.scope_pipe not in scheme.pipes:
                continue
            if off.scope_pipe not in branch_cache:
                from .editops import branch_of
                branch_cache[off.scope_pipe] = branch_of(scheme, off.scope_pipe)
            if pipe.id not in branch_cache[off.scope_pipe]:
                continue
        # crossing parameter of the anchor plane, if interior
        p0 = off.anchor_point(scheme)
        normal = off.plane_normal(scheme)
        da = (pipe.a - p0).dot(normal)
        db = (pipe.b - p0).dot(normal)
        if (da > 0) != (db > 0) and abs(da - db) > 1e-12:
            t = da / (da - db)
            if 1e-9 < t < 1.0 - 1e-9:
                splits.append((t, False))
    return sorted(splits)


def projected_pipe_polyline(scheme: Scheme, pipe: Pipe, proj: Projection,
                            branch_cache: dict | None = None
                            ) -> list[tuple[Vec2, Vec2]]:
    """Displaced paper segments of a pipe before cut-interval subtraction."""
    if branch_cache is None:
        branch_cache = {}
    cuts = [(t, False) for t, _ in _offset_split_params(scheme, pipe, branch_cache)]
    params = sorted({0.0, 1.0} | {t for t, _ in cuts})
    out = []
    for t0, t1 in zip(params, params[1:]):
        mid = (t0 + t1) / 2.0
        disp = paper_displacement(scheme, pipe.point_at(mid), pipe.id, mid,
                                  branch_cache=branch_cache)
        base = scheme.settings.placement
        a = v2_add(v2_add(project(pipe.point_at(t0), proj), disp), base)
        b = v2_add(v2_add(project(pipe.point_at(t1), proj), disp), base)
        out.append((a, b))
    return out


def _render_pipe(scheme: Scheme, pipe: Pipe, proj: Projection, out: Drawable,
                 branch_cache: dict, cls: str = "pipe") -> None:
    visible = _visible_param_intervals(scheme, pipe)
    splits = _offset_split_params(scheme, pipe, branch_cache)
    breaks = [t for t, declared in splits if declared]
    boundaries = sorted({t for t, _ in splits})

    pieces: list[tuple[float, float]] = []
    for v0, v1 in visible:
        cursor = v0
        for b in boundaries:
            if v0 < b < v1:
                pieces.append((cursor, b))
                cursor = b
        pieces.append((cursor, v1))

    base = scheme.settings.placement
    img_dir = None
    for t0, t1 in pieces:
        if t1 - t0 <= 1e-12:
            continue
        mid = (t0 + t1) / 2.0
        disp = paper_displacement(scheme, pipe.point_at(mid), pipe.id, mid,
                                  branch_cache=branch_cache)
        a = v2_add(v2_add(project(pipe.point_at(t0), proj), disp), base)
        b = v2_add(v2_add(project(pipe.point_at(t1), proj), disp), base)
        if v2_norm(v2_sub(b, a)) > 1e-9:
            img_dir = v2_unit(v2_sub(b, a))
        out.add(Primitive(kind="line", cls=cls, points=[a, b]))

    if img_dir is None:
        return
    for t in breaks:
        disp = paper_displacement(scheme, pipe.point_at(min(t + 1e-6, 1.0)),
                                  pipe.id, min(t + 1e-6, 1.0),
                                  branch_cache=branch_cache)
        center = v2_add(v2_add(project(pipe.point_at(t), proj), disp), base)
        _break_glyph(out, center, img_dir, cls)


def _break_glyph(out: Drawable, center: Vec2, direction: Vec2, cls: str) -> None:
    c, s = math.cos(BREAK_STROKE_ANGLE), math.sin(BREAK_STROKE_ANGLE)
    stroke_dir = (direction[0] * c - direction[1] * s,
                  direction[0] * s + direction[1] * c)
    half = v2_scale(stroke_dir, BREAK_STROKE_LEN / 2.0)
    for k in (-0.5, 0.5):
        at = v2_add(center, v2_scale(direction, k * BREAK_STROKE_SPACING))
        out.add(Primitive(kind="line", cls=cls, tag="break",
                          points=[v2_sub(at, half), v2_add(at, half)]))


# ---------------------------------------------------------------------------
# blocks


def _block_point(scheme: Scheme, block: BlockInstance, local: Vec2,
                 proj: Projection, branch_cache: dict) -> Vec2:
    p3 = (block.position
          + block.u.scaled(local[0] * block.scale)
          + block.v.scaled(local[1] * block.scale))
    return projected_point(scheme, p3, proj, owner_block=block.id,
                           branch_cache=branch_cache)


def _render_block(scheme: Scheme, block: BlockInstance, symbol, proj: Projection,
                  out: Drawable, branch_cache: dict, cls: str = "block") -> None:
    for prim in symbol.primitives:
        if prim.kind == "segment":
            pts = [_block_point(scheme, block, p, proj, branch_cache)
                   for p in prim.points]
            out.add(Primitive(kind="line", cls=cls, points=pts))
        elif prim.kind == "rectangle":
            (x0, y0), (x1, y1) = prim.points
            corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
            pts = [_block_point(scheme, block, p, proj, branch_cache)
                   for p in corners]
            out.add(Primitive(kind="polyline", cls=cls, points=pts, closed=True))
        elif prim.kind in ("polyline", "filled_polyline", "polygon"):
            pts = [_block_point(scheme, block, p, proj, branch_cache)
                   for p in prim.points]
            out.add(Primitive(
                kind="polyline", cls=cls, points=pts,
                closed=prim.kind != "polyline",
                filled=prim.kind == "filled_polyline"))
        elif prim.kind in ("circle", "arc"):
            cx, cy = prim.points[0]
            a0 = math.radians(prim.start_angle)
            a1 = math.radians(prim.end_angle if prim.kind == "arc" else
                              prim.start_angle + 360.0)
            pts = []
            for k in range(ARC_SEGMENTS + 1):
                ang = a0 + (a1 - a0) * k / ARC_SEGMENTS
                local = (cx + prim.radius * math.cos(ang),
                         cy + prim.radius * math.sin(ang))
                pts.append(_block_point(scheme, block, local, proj, branch_cache))
            out.add(Primitive(kind="polyline", cls=cls, points=pts,
                              closed=prim.kind == "circle"))


def _fallback_symbol_box(scheme: Scheme, block: BlockInstance, proj: Projection,
                         out: Drawable, branch_cache: dict, cls: str) -> None:
    # block whose symbol is not in the current library: draw a 4 mm box
    h = 2.0
    corners = [(-h, -h), (h, -h), (h, h), (-h, h)]
    pts = [_block_point(scheme, block, p, proj, branch_cache) for p in corners]
    out.add(Primitive(kind="polyline", cls=cls, points=pts, closed=True,
                      tag="missing-symbol"))


# ---------------------------------------------------------------------------
# dimensions, leaders, marks, grid


def _render_dimension(scheme: Scheme, dim, proj: Projection, out: Drawable,
                      branch_cache: dict, text_height: float,
                      cls: str = "dimension") -> None:
    axis_img = project(GLOBAL_AXES[dim.axis], proj)
    if v2_norm(axis_img) < 1e-9:
        return
    axis_dir = v2_unit(axis_img)
    ext_axis = max((a for a in range(3) if a != dim.axis),
                   key=lambda a: abs(v2_cross(axis_dir, project(GLOBAL_AXES[a], proj))))
    ext_img = project(GLOBAL_AXES[ext_axis], proj)
    if v2_norm(ext_img) < 1e-9:
        return
    ext_dir = v2_scale(v2_unit(ext_img), float(dim.side))

    origins = []
    for o in dim.origins:
        p3 = o.point(scheme)
        pipe = o.pipe if hasattr(o, "pipe") else None
        t = {"a": 0.0, "b": 1.0}.get(getattr(o, "end", ""), None)
        img = projected_point(scheme, p3, proj, owner_pipe=pipe, owner_t=t,
                              owner_block=getattr(o, "block", None),
                              branch_cache=branch_cache)
        origins.append((p3.component(dim.axis), img))
    origins.sort(key=lambda pair: pair[0])

    line_anchor = v2_add(origins[0][1], v2_scale(ext_dir, dim.offset))
    feet = []
    denom = v2_cross(ext_dir, axis_dir)
    if abs(denom) < 1e-9:
        return
    for _, img in origins:
        # intersection of img + s*ext_dir with the dimension line
        rel = v2_sub(line_anchor, img)
        s = v2_cross(rel, axis_dir) / denom
        foot = v2_add(img, v2_scale(ext_dir, s))
        feet.append(foot)
        out.add(Primitive(kind="line", cls=cls, tag="extension",
                          points=[img, foot]))
    out.add(Primitive(kind="line", cls=cls, tag="dimline",
                      points=[feet[0], feet[-1]]))
    tick = v2_scale(v2_unit(v2_add(axis_dir, ext_dir)), 1.0)
    for foot in feet:
        out.add(Primitive(kind="line", cls=cls, tag="tick",
                          points=[v2_sub(foot, tick), v2_add(foot, tick)]))
    up = v2_scale(v2_unit((-axis_dir[1], axis_dir[0])), 0.8)
    coords = [o[0] for o in origins]
    for i in range(len(feet) - 1):
        value = coords[i + 1] - coords[i]
        if value <= EPS:
            continue
        mid = v2_scale(v2_add(feet[i], feet[i + 1]), 0.5)
        out.add(Primitive(kind="text", cls=cls, tag="value",
                          points=[v2_add(mid, up)], text=f"{value:g}",
                          height=text_height))


def _leader_points(scheme: Scheme, obj, proj: Projection,
                   branch_cache: dict) -> list[tuple[Vec2, Vec2, bool]]:
    base = scheme.settings.placement
    out = []
    for idx, l in enumerate(obj.leaders):
        target = projected_point(scheme, l.point(scheme), proj,
                                 owner_pipe=l.pipe, owner_t=l.t,
                                 owner_block=l.block, branch_cache=branch_cache)
        anchor = v2_add(l.anchor, base)
        out.append((anchor, target, idx == obj.main_leader))
    return out


def _render_text(scheme: Scheme, obj, proj: Projection, out: Drawable,
                 branch_cache: dict, text_height: float,
                 cls: str = "leader") -> None:
    for anchor, target, is_main in _leader_points(scheme, obj, proj, branch_cache):
        out.add(Primitive(kind="arrow", cls=cls, points=[anchor, target]))
        if is_main:
            shelf_len = max(6.0, 0.6 * text_height * len(obj.text or " "))
            shelf_end = v2_add(anchor, (shelf_len, 0.0))
            out.add(Primitive(kind="line", cls=cls, tag="shelf",
                              points=[anchor, shelf_end]))
            out.add(Primitive(kind="text", cls=cls,
                              points=[v2_add(anchor, (1.0, 0.8))],
                              text=obj.text, height=text_height))


def _render_designator(scheme: Scheme, desig, proj: Projection, out: Drawable,
                       branch_cache: dict, text_height: float,
                       cls: str = "leader") -> None:
    for anchor, target, is_main in _leader_points(scheme, desig, proj, branch_cache):
        out.add(Primitive(kind="arrow", cls=cls, points=[anchor, target]))
        if not is_main:
            continue
        r = max(2.5, 0.9 * text_height)
        for i, number in enumerate(desig.positions):
            center = v2_add(anchor, (r, (2 * r) * i + r))
            pts = []
            for k in range(ARC_SEGMENTS + 1):
                ang = 2 * math.pi * k / ARC_SEGMENTS
                pts.append(v2_add(center, (r * math.cos(ang), r * math.sin(ang))))
            out.add(Primitive(kind="polyline", cls=cls, tag="balloon",
                              points=pts, closed=True))
            out.add(Primitive(kind="text", cls=cls, tag="position",
                              points=[v2_add(center, (-0.3 * text_height,
                                                      -0.35 * text_height))],
                              text=str(number), height=text_height))


def _render_height_mark(scheme: Scheme, mark, proj: Projection, out: Drawable,
                        branch_cache: dict, text_height: float,
                        cls: str = "leader") -> None:
    at = projected_point(scheme, mark.point(scheme), proj,
                         owner_pipe=mark.pipe, owner_t=mark.t,
                         branch_cache=branch_cache)
    h = text_height * 0.8
    tri = [at, v2_add(at, (-h / 2, h)), v2_add(at, (h / 2, h)), at]
    out.add(Primitive(kind="polyline", cls=cls, tag="height-mark",
                      points=tri, closed=True))
    shelf = [v2_add(at, (-h / 2, h)), v2_add(at, (h * 2.5, h))]
    out.add(Primitive(kind="line", cls=cls, tag="height-shelf", points=shelf))
    sign = "+" if mark.level >= 0 else "-"
    out.add(Primitive(kind="text", cls=cls, tag="level",
                      points=[v2_add(at, (h * 0.6, h + 0.5))],
                      text=f"{sign}{abs(mark.level):.3f}", height=text_height))


def _render_grid(scheme: Scheme, grid, proj: Projection, out: Drawable,
                 text_height: float, cls: str = "grid") -> None:
    base = scheme.settings.placement
    if not grid.letter_axes or not grid.number_axes:
        return
    y_lo = min(o for _, o in grid.letter_axes) - 1000.0
    y_hi = max(o for _, o in grid.letter_axes) + 1000.0
    x_lo = min(o for _, o in grid.number_axes) - 1000.0
    x_hi = max(o for _, o in grid.number_axes) + 1000.0

    def img(x: float, y: float) -> Vec2:
        return v2_add(project(Point3(x, y, 0.0), proj), base)

    for label, x in grid.number_axes:
        a, b = img(x, y_lo), img(x, y_hi)
        out.add(Primitive(kind="line", cls=cls, tag="axis", points=[a, b]))
        _grid_bubble(out, a, label, text_height, cls)
    for label, y in grid.letter_axes:
        a, b = img(x_lo, y), img(x_hi, y)
        out.add(Primitive(kind="line", cls=cls, tag="axis", points=[a, b]))
        _grid_bubble(out, a, label, text_height, cls)


def _grid_bubble(out: Drawable, at: Vec2, label: str, text_height: float,
                 cls: str) -> None:
    pts = []
    for k in range(ARC_SEGMENTS + 1):
        ang = 2 * math.pi * k / ARC_SEGMENTS
        pts.append(v2_add(at, (GRID_BUBBLE_RADIUS * math.cos(ang),
                               GRID_BUBBLE_RADIUS * math.sin(ang))))
    out.add(Primitive(kind="polyline", cls=cls, tag="bubble", points=pts,
                      closed=True))
    out.add(Primitive(kind="text", cls=cls, tag="bubble-label",
                      points=[v2_add(at, (-0.3 * text_height, -0.35 * text_height))],
                      text=label, height=text_height))


# ---------------------------------------------------------------------------
# top level


def render(scheme: Scheme, settings: RenderSettings | None = None,
           library=None, construction_ids: set[int] | None = None) -> Drawable:
    """Drawable for the whole scheme under the given settings.

    Objects whose ids are in ``construction_ids`` render in the construction
    style (used for previews)."""
    from .projection import PRESETS

    settings = settings or RenderSettings()
    construction_ids = construction_ids or set()
    proj = scheme.settings.projection
    if settings.projection_name:
        proj = PRESETS.get(settings.projection_name, proj)
    if settings.projection is not None:
        proj = settings.projection
    visible = dict(scheme.settings.visibility)
    visible.update(settings.visibility)
    branch_cache: dict = {}

    def cls_for(oid: int, default: str) -> str:
        return "construction" if oid in construction_ids else default

    out = Drawable()
    if visible.get("grid", True):
        for gid in sorted(scheme.grids):
            _render_grid(scheme, scheme.grids[gid], proj, out, settings.text_height)
    if visible.get("pipe", True):
        for pid in sorted(scheme.pipes):
            pipe = scheme.pipes[pid]
            if pipe.visible:
                _render_pipe(scheme, pipe, proj, out, branch_cache,
                             cls_for(pid, "pipe"))
    if visible.get("block", True):
        for bid in sorted(scheme.blocks):
            block = scheme.blocks[bid]
            symbol = None
            if library is not None:
                symbol = library.symbols.get(block.symbol)
            if symbol is None:
                _fallback_symbol_box(scheme, block, proj, out, branch_cache,
                                     cls_for(bid, "block"))
            else:
                _render_block(scheme, block, symbol, proj, out, branch_cache,
                              cls_for(bid, "block"))
    if visible.get("dimension", True):
        for did in sorted(scheme.dimensions):
            _render_dimension(scheme, scheme.dimensions[did], proj, out,
                              branch_cache, settings.text_height,
                              cls_for(did, "dimension"))
    if visible.get("text", True):
        for tid in sorted(scheme.texts):
            _render_text(scheme, scheme.texts[tid], proj, out, branch_cache,
                         settings.text_height, cls_for(tid, "leader"))
    if visible.get("designator", True):
        for gid in sorted(scheme.designators):
            _render_designator(scheme, scheme.designators[gid], proj, out,
                               branch_cache, settings.text_height,
                               cls_for(gid, "leader"))
    if visible.get("height_mark", True):
        for hid in sorted(scheme.height_marks):
            _render_height_mark(scheme, scheme.height_marks[hid], proj, out,
                                branch_cache, settings.text_height,
                                cls_for(hid, "leader"))

    floor = settings.floor_label if settings.floor_label is not None \
        else scheme.settings.floor_label
    bounds = _bounds(out)
    if settings.axes_glyph:
        _render_axes_glyph(out, proj, bounds, settings.text_height)
        bounds = _bounds(out)
    if floor:
        if bounds is None:
            at = (0.0, 0.0)
        else:
            at = (bounds[2] - 0.6 * settings.text_height * len(floor),
                  bounds[3] + settings.text_height)
        out.add(Primitive(kind="text", cls="glyph", tag="floor-label",
                          points=[at], text=floor, height=settings.text_height))
    return out


def _render_axes_glyph(out: Drawable, proj: Projection, bounds, text_height):
    from .projection import axes_glyph

    if bounds is None:
        origin = (0.0, 0.0)
    else:
        min_x, min_y, max_x, max_y = bounds
        origin = (min_x - 2.0 * GLYPH_ARROW_LEN, max_y + GLYPH_ARROW_LEN)
    for item in axes_glyph(proj):
        if item.label is None:
            out.add(Primitive(kind="arrow", cls="glyph", tag="axis",
                              points=[v2_add(origin, item.start),
                                      v2_add(origin, item.end)]))
        else:
            at = v2_add(v2_add(origin, item.end), (0.5, 0.5))
            out.add(Primitive(kind="text", cls="glyph", tag="axis-label",
                              points=[at], text=item.label, height=text_height))


def _bounds(drawable: Drawable):
    xs, ys = [], []
    for prim in drawable.primitives:
        for x, y in prim.points:
            xs.append(x)
            ys.append(y)
    if not xs:
        return None
    return (min(xs), min(ys), max(xs), max(ys))


def render_preview(scheme: Scheme, pending, settings: RenderSettings | None = None,
                   library=None) -> Drawable:
    """Base drawing plus not-yet-committed objects in the construction style.

    ``pending`` is a preview payload: a scheme snapshot that already contains
    the candidate objects plus the set of their ids."""
    if pending is None:
        raise StaleToken("no pending preview")
    preview_scheme, pending_ids = pending
    return render(preview_scheme, settings, library=library,
                  construction_ids=set(pending_ids))
