"""Symbol definitions, validation, orientation-variant enumeration and block
placement/attachment/replacement.

Symbol geometry is 2D in the block plane; a placed instance poses it in 3D
through an orthonormal frame (axis u, in-plane v, normal n) plus a uniform
scale. Orientation variants carry the global axis that lies in the block
plane, because the extension line for the block must run along it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import (
    AngleTooLarge,
    CutCollision,
    DegenerateAxis,
    NoFreeSlot,
    NoHostPipe,
    NotCoincident,
    ParseError,
    RaysIncompatible,
    UnknownSymbol,
)
from .geometry import (
    GLOBAL_AXES,
    AXIS_NAMES,
    Point3,
    Vec2,
    angle_between,
    segment_param_of_point,
    segment_point_dist_3d,
    v2_norm,
)
from .model import (
    ARITY_BY_ATTACH_KIND,
    BlockInstance,
    Connection,
    PipeEndRef,
    Scheme,
    atomic,
)

PRIMITIVE_KINDS = (
    "segment", "rectangle", "polyline", "filled_polyline",
    "circle", "arc", "polygon",
)

# Maximum spatial angle between an attachment ray and the pipe axis, radians.
MAX_ATTACH_ANGLE = math.pi / 4
ATTACH_ANGLE_TOL = 1e-6

PLANE_TOL = 1e-6


@dataclass
class SymbolPrimitive:
    """One drawing element of a symbol, in symbol-local 2D mm."""

    kind: str
    points: list[Vec2] = field(default_factory=list)
    radius: float = 0.0
    start_angle: float = 0.0
    end_angle: float = 360.0

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "points": [list(p) for p in self.points]}
        if self.kind in ("circle", "arc"):
            d["radius"] = self.radius
        if self.kind == "arc":
            d["startAngle"] = self.start_angle
            d["endAngle"] = self.end_angle
        return d

    @staticmethod
    def from_dict(d: dict) -> "SymbolPrimitive":
        return SymbolPrimitive(
            kind=d["kind"],
            points=[tuple(p) for p in d.get("points", [])],
            radius=float(d.get("radius", 0.0)),
            start_angle=float(d.get("startAngle", 0.0)),
            end_angle=float(d.get("endAngle", 360.0)),
        )


@dataclass
class Ray:
    """Attachment ray: unit-ish 2D direction in the symbol plane + reach, mm."""

    direction: Vec2
    length: float

    def to_dict(self) -> dict:
        return {"direction": list(self.direction), "length": self.length}

    @staticmethod
    def from_dict(d: dict) -> "Ray":
        return Ray(direction=tuple(d["direction"]), length=float(d["length"]))


@dataclass
class AttachmentSpec:
    """How a symbol binds to pipes: axial (1), angular (2) or tee (3)."""

    kind: str
    cut: float = 0.0                       # axial: cut-out length on the pipe, mm
    rays: list[Ray] = field(default_factory=list)

    @property
    def arity(self) -> int:
        return ARITY_BY_ATTACH_KIND[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "cut": self.cut,
                "rays": [r.to_dict() for r in self.rays]}

    @staticmethod
    def from_dict(d: dict) -> "AttachmentSpec":
        return AttachmentSpec(
            kind=d["kind"], cut=float(d.get("cut", 0.0)),
            rays=[Ray.from_dict(r) for r in d.get("rays", [])],
        )


@dataclass
class SymbolDef:
    """Conditional graphic designation: primitives plus attachment spec."""

    name: str
    primitives: list[SymbolPrimitive]
    attachment: AttachmentSpec
    sym_axis: bool = False        # symmetric about the attachment axis
    sym_normal: bool = False      # symmetric about the normal to the axis

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "primitives": [p.to_dict() for p in self.primitives],
            "attachment": self.attachment.to_dict(),
            "symAxis": self.sym_axis, "symNormal": self.sym_normal,
        }

    @staticmethod
    def from_dict(d: dict) -> "SymbolDef":
        return SymbolDef(
            name=d["name"],
            primitives=[SymbolPrimitive.from_dict(p) for p in d["primitives"]],
            attachment=AttachmentSpec.from_dict(d["attachment"]),
            sym_axis=bool(d.get("symAxis", False)),
            sym_normal=bool(d.get("symNormal", False)),
        )


@dataclass
class Library:
    """Named collection of symbol definitions."""

    name: str
    symbols: dict[str, SymbolDef] = field(default_factory=dict)

    def get(self, name: str) -> SymbolDef:
        try:
            return self.symbols[name]
        except KeyError:
            raise UnknownSymbol(f"symbol {name!r} not in library {self.name!r}") from None

    def to_dict(self) -> dict:
        return {"name": self.name,
                "symbols": {n: s.to_dict() for n, s in self.symbols.items()}}

    @staticmethod
    def from_dict(d: dict) -> "Library":
        return Library(
            name=d["name"],
            symbols={n: SymbolDef.from_dict(s) for n, s in d["symbols"].items()},
        )


def load_library(path: str) -> Library:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"library file {path}: {exc}") from exc
    lib = Library.from_dict(data)
    for name, sym in lib.symbols.items():
        problems = validate_symbol(sym)
        if problems:
            raise ParseError(f"symbol {name!r}: {', '.join(problems)}")
    return lib


def save_library(lib: Library, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lib.to_dict(), fh, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# validation


def validate_symbol(sym: SymbolDef) -> list[str]:
    """Violation codes for a symbol definition; empty means placeable."""
    out: list[str] = []
    if not sym.primitives:
        out.append("EmptyGeometry")
    for p in sym.primitives:
        if p.kind not in PRIMITIVE_KINDS:
            out.append("BadPrimitiveKind")
        elif p.kind in ("circle", "arc"):
            if len(p.points) != 1 or p.radius <= 0:
                out.append("BadPrimitiveGeometry")
        elif p.kind in ("segment", "rectangle"):
            if len(p.points) != 2:
                out.append("BadPrimitiveGeometry")
        elif len(p.points) < 2:
            out.append("BadPrimitiveGeometry")
    att = sym.attachment
    if att.kind not in ARITY_BY_ATTACH_KIND:
        out.append("ForbiddenAttachmentKind")
        return out
    if att.kind == "axial":
        if att.cut < 0:
            out.append("NegativeCut")
        if att.rays:
            out.append("UnexpectedRays")
    else:
        want = att.arity
        if len(att.rays) != want:
            out.append("BadRayCount")
        else:
            dirs = []
            for r in att.rays:
                if v2_norm(r.direction) < 1e-9 or r.length < 0:
                    out.append("DegenerateRay")
                    break
                dirs.append((r.direction[0] / v2_norm(r.direction),
                             r.direction[1] / v2_norm(r.direction)))
            else:
                for i in range(len(dirs)):
                    for j in range(i + 1, len(dirs)):
                        d = (dirs[i][0] - dirs[j][0], dirs[i][1] - dirs[j][1])
                        if math.hypot(*d) < 1e-9:
                            out.append("DuplicateRayDirection")
    return out


# ---------------------------------------------------------------------------
# orientation variants


@dataclass(frozen=True)
class OrientationVariant:
    """One spatial pose of a block: frame plus the in-plane global axis."""

    u: Point3
    v: Point3
    n: Point3
    ext_axis: int      # 0=x, 1=y, 2=z: a coordinate axis lying in the plane
    rot: int           # 0/1: 180-degree turn about u applied
    mir: int           # 0/1: mirrored about the block plane

    def to_dict(self) -> dict:
        return {"u": self.u.to_list(), "v": self.v.to_list(),
                "n": self.n.to_list(), "extAxis": AXIS_NAMES[self.ext_axis],
                "rot": self.rot, "mir": self.mir}


def enumerate_orientations(sym: SymbolDef,
                           pipe_axes: list[Point3]) -> list[OrientationVariant]:
    """All placement poses the user can cycle through with the spacebar.

    One candidate plane per global axis not parallel to the primary pipe axis
    (the extension line for the block must run along a coordinate axis inside
    its plane), times two 180-degree rotations about the axis, times two
    mirrors about the plane; declared symmetries quotient those pairs.
    Deterministic order: axes X, Y, Z, then rotation, then mirror.
    """
    if not pipe_axes:
        raise DegenerateAxis("at least one pipe axis required")
    for a in pipe_axes:
        if abs(a.norm() - 1.0) > 1e-6:
            raise DegenerateAxis(f"pipe axis {a} is not unit length")
    u = pipe_axes[0]
    out: list[OrientationVariant] = []
    for axis_idx, e in enumerate(GLOBAL_AXES):
        cr = u.cross(e)
        if cr.norm() <= PLANE_TOL:
            continue
        n0 = cr.unit()
        # all supplied pipe axes must lie in the candidate plane
        if any(abs(a.dot(n0)) > PLANE_TOL for a in pipe_axes[1:]):
            continue
        v0 = n0.cross(u)
        for rot in (0, 1) if not sym.sym_axis else (0,):
            for mir in (0, 1) if not sym.sym_normal else (0,):
                sv = -1.0 if rot else 1.0
                sn = -1.0 if (rot + mir) % 2 else 1.0
                out.append(OrientationVariant(
                    u=u, v=v0.scaled(sv), n=n0.scaled(sn),
                    ext_axis=axis_idx, rot=rot, mir=mir))
    return out


def nearest_variant(variants: list[OrientationVariant],
                    u: Point3, v: Point3, n: Point3) -> OrientationVariant:
    """Variant whose frame is closest to the given one (first wins ties)."""
    def dist(var: OrientationVariant) -> float:
        return ((var.u - u).norm() ** 2 + (var.v - v).norm() ** 2
                + (var.n - n).norm() ** 2)
    best = variants[0]
    best_d = dist(best)
    for var in variants[1:]:
        d = dist(var)
        if d < best_d - 1e-12:
            best, best_d = var, d
    return best


# ---------------------------------------------------------------------------
# placement helpers


def ray_world_direction(block: BlockInstance, ray: Ray) -> Point3:
    """Attachment ray posed in 3D through the block frame."""
    d = block.u.scaled(ray.direction[0]) + block.v.scaled(ray.direction[1])
    return d.unit()


def outward_direction(scheme: Scheme, pipe_id: int, junction: Point3) -> Point3:
    """Unit direction of a pipe pointing away from the junction point."""
    pipe = scheme.pipe(pipe_id)
    if pipe.a.is_close(junction):
        return (pipe.b - pipe.a).unit()
    return (pipe.a - pipe.b).unit()


def _attach_angle_ok(ray_dir: Point3, pipe_dir: Point3) -> bool:
    return angle_between(ray_dir, pipe_dir) <= MAX_ATTACH_ANGLE + ATTACH_ANGLE_TOL


def cut_interval_for_axial(pipe, center_t: float, cut_mm: float) -> tuple[float, float]:
    """Cut interval of length cut_mm centered at a parameter, slid inward so
    it stays on the pipe."""
    length = pipe.length()
    half = min(cut_mm / 2.0 / length, 0.5)
    t0, t1 = center_t - half, center_t + half
    if t0 < 0.0:
        t1, t0 = t1 - t0, 0.0
    if t1 > 1.0:
        t0, t1 = max(0.0, t0 - (t1 - 1.0)), 1.0
    return (t0, t1)


def cut_interval_from_junction(pipe, junction: Point3, reach_mm: float) -> tuple[float, float]:
    """Interval hidden under an angular/tee block, measured from the junction
    end inward."""
    length = pipe.length()
    d = min(reach_mm / length, 1.0)
    if pipe.a.is_close(junction):
        return (0.0, d)
    return (1.0 - d, 1.0)


def _check_cut_free(scheme: Scheme, pipe_id: int, interval: tuple[float, float],
                    ignore_block: int | None = None) -> None:
    t0, t1 = interval
    for other in scheme.blocks_on_pipe(pipe_id):
        if other.id == ignore_block:
            continue
        o0, o1 = other.cut_intervals.get(pipe_id, (None, None))
        if o0 is None:
            continue
        if t0 < o1 - 1e-9 and o0 < t1 - 1e-9:
            raise CutCollision(
                f"cut [{t0:g},{t1:g}] on pipe {pipe_id} overlaps block {other.id}")


def _connect_pair(scheme: Scheme, e1: PipeEndRef, e2: PipeEndRef) -> int | None:
    """Connect two ends if not already connected; returns new id or None."""
    if e1.pipe == e2.pipe:
        return None
    key = tuple(sorted((e1.key(), e2.key())))
    for c in scheme.connections.values():
        if tuple(sorted((c.e1.key(), c.e2.key()))) == key:
            return None
    cid = scheme.new_id()
    scheme.connections[cid] = Connection(id=cid, e1=e1, e2=e2)
    return cid


def _junction_end(scheme: Scheme, pipe_id: int, junction: Point3) -> PipeEndRef:
    pipe = scheme.pipe(pipe_id)
    if pipe.a.is_close(junction):
        return PipeEndRef(pipe_id, "a")
    if pipe.b.is_close(junction):
        return PipeEndRef(pipe_id, "b")
    raise NotCoincident(f"pipe {pipe_id} has no end at the junction")


def _connect_attached_pairwise(scheme: Scheme, block: BlockInstance) -> None:
    if block.attach_kind == "axial":
        return
    ends = [_junction_end(scheme, p, block.position) for p in block.attachments]
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            _connect_pair(scheme, ends[i], ends[j])


# ---------------------------------------------------------------------------
# operations


def place_block(scheme: Scheme, library: Library, symbol: str, at: Point3,
                snap_radius: float = 5.0, orientation: int = 0,
                extra_pipes: list[int] | None = None,
                position_t: float | None = None) -> int:
    """Place a library symbol on the pipe(s) around a 3D point.

    A pipe end within the snap radius wins over a pipe body. Axial symbols
    bind to the single host pipe (mid-pipe position refinable with
    ``position_t``); angular and tee symbols sit on a pipe-end junction and
    take the extra pipes to bind, connecting all bound pipes pairwise.
    """
    sym = library.get(symbol)
    extra_pipes = list(extra_pipes or [])

    host_id, host_end = _find_host(scheme, at, snap_radius)
    if host_id is None:
        raise NoHostPipe(f"no pipe within {snap_radius:g} mm of {at}")
    host = scheme.pipe(host_id)

    if sym.attachment.kind == "axial":
        if host_end is not None:
            center_t = 0.0 if host_end == "a" else 1.0
            position = host.end_point(host_end)
        else:
            center_t = position_t if position_t is not None \
                else segment_param_of_point(at, host.a, host.b)
            position = host.point_at(center_t)
        interval = cut_interval_for_axial(host, center_t, sym.attachment.cut)
        _check_cut_free(scheme, host_id, interval)
        axes = [host.direction()]
        variants = enumerate_orientations(sym, axes)
        var = variants[orientation % len(variants)]
        bid = scheme.new_id()
        scheme.blocks[bid] = BlockInstance(
            id=bid, symbol=symbol, attach_kind="axial", position=position,
            u=var.u, v=var.v, n=var.n,
            attachments=[host_id], cut_lengths=[sym.attachment.cut],
            cut_intervals={host_id: interval})
        return bid

    # angular / tee: the block sits on a junction at a pipe end
    if host_end is None:
        raise NoHostPipe("angular/tee symbols attach at a pipe end")
    junction = host.end_point(host_end)
    pipe_ids = [host_id] + extra_pipes
    if len(pipe_ids) > sym.attachment.arity:
        raise RaysIncompatible(
            f"{len(pipe_ids)} pipes for arity {sym.attachment.arity}")
    for pid in pipe_ids[1:]:
        _junction_end(scheme, pid, junction)    # raises NotCoincident

    out_dirs = [outward_direction(scheme, pid, junction) for pid in pipe_ids]
    axes = _independent_axes(out_dirs)
    variants = enumerate_orientations(sym, axes)
    if not variants:
        raise RaysIncompatible("pipes span no admissible block plane")
    var = variants[orientation % len(variants)]

    block = BlockInstance(
        id=0, symbol=symbol, attach_kind=sym.attachment.kind,
        position=junction, u=var.u, v=var.v, n=var.n)
    assignment = _assign_rays(block, sym.attachment.rays, out_dirs)
    if assignment is None:
        raise RaysIncompatible("no ray assignment keeps every angle within 45 degrees")

    intervals = {}
    for k, pid in enumerate(pipe_ids):
        ray = sym.attachment.rays[assignment[k]]
        iv = cut_interval_from_junction(scheme.pipe(pid), junction, ray.length)
        _check_cut_free(scheme, pid, iv)
        intervals[pid] = iv
    with atomic(scheme):
        bid = scheme.new_id()
        block.id = bid
        block.attachments = pipe_ids
        block.cut_lengths = [sym.attachment.rays[assignment[k]].length
                             for k in range(len(pipe_ids))]
        block.cut_intervals = intervals
        scheme.blocks[bid] = block
        _connect_attached_pairwise(scheme, block)
        return bid


def _find_host(scheme: Scheme, at: Point3,
               snap_radius: float) -> tuple[int | None, str | None]:
    best_end: tuple[float, int, str] | None = None
    for pid in sorted(scheme.pipes):
        pipe = scheme.pipes[pid]
        for end in ("a", "b"):
            d = at.dist(pipe.end_point(end))
            if d <= snap_radius and (best_end is None or d < best_end[0] - 1e-12):
                best_end = (d, pid, end)
    if best_end is not None:
        return (best_end[1], best_end[2])
    best_body: tuple[float, int] | None = None
    for pid in sorted(scheme.pipes):
        pipe = scheme.pipes[pid]
        d = segment_point_dist_3d(at, pipe.a, pipe.b)
        if d <= snap_radius and (best_body is None or d < best_body[0] - 1e-12):
            best_body = (d, pid)
    if best_body is not None:
        return (best_body[1], None)
    return (None, None)


def _independent_axes(dirs: list[Point3]) -> list[Point3]:
    """Pipe directions with (anti)parallel duplicates removed."""
    out: list[Point3] = []
    for d in dirs:
        if all(d.cross(e).norm() > PLANE_TOL for e in out):
            out.append(d)
    return out


def _assign_rays(block: BlockInstance, rays: list[Ray],
                 pipe_dirs: list[Point3]) -> list[int] | None:
    """First permutation of ray slots (lexicographic) compatible with every
    pipe direction, or None."""
    from itertools import permutations
    world = [ray_world_direction(block, r) for r in rays]
    for perm in permutations(range(len(rays)), len(pipe_dirs)):
        if all(_attach_angle_ok(world[perm[k]], pipe_dirs[k])
               for k in range(len(pipe_dirs))):
            return list(perm)
    return None


def attach_pipe_to_block(scheme: Scheme, library: Library, block_id: int,
                         pipe_id: int) -> None:
    """Bind one more pipe to a block with a free attachment slot.

    The spatial angle between the free ray and the pipe axis may not exceed
    45 degrees; a pipe out of the block plane rotates the block into the
    plane formed by the attached pipes.
    """
    block = scheme.block(block_id)
    sym = library.get(block.symbol)
    if len(block.attachments) >= block.arity:
        raise NoFreeSlot(f"block {block_id} has all {block.arity} slots used")
    if pipe_id in block.attachments:
        raise RaysIncompatible(f"pipe {pipe_id} is already attached")
    junction = block.position
    _junction_end(scheme, pipe_id, junction)     # raises NotCoincident
    new_dir = outward_direction(scheme, pipe_id, junction)

    with atomic(scheme):
        if abs(new_dir.dot(block.n)) > PLANE_TOL and block.attachments:
            first_dir = outward_direction(scheme, block.attachments[0], junction)
            normal = first_dir.cross(new_dir)
            if normal.norm() > PLANE_TOL:
                block.n = normal.unit()
                block.v = block.n.cross(block.u)

        used = len(block.attachments)
        free_rays = sym.attachment.rays[used:]
        ray = None
        for r in free_rays:
            if _attach_angle_ok(ray_world_direction(block, r), new_dir):
                ray = r
                break
        if ray is None:
            worst = min(angle_between(ray_world_direction(block, r), new_dir)
                        for r in free_rays)
            raise AngleTooLarge(
                f"best free ray is {math.degrees(worst):.1f} degrees off the pipe axis")

        iv = cut_interval_from_junction(scheme.pipe(pipe_id), junction, ray.length)
        _check_cut_free(scheme, pipe_id, iv)
        block.attachments.append(pipe_id)
        block.cut_lengths.append(ray.length)
        block.cut_intervals[pipe_id] = iv
        _connect_attached_pairwise(scheme, block)


def replace_block(scheme: Scheme, library: Library, block_id: int,
                  new_symbol: str) -> int:
    """Swap a block's symbol in place, keeping attachments up to the new
    arity (surplus dropped highest slot first, with their pairwise
    connections at the junction removed)."""
    block = scheme.block(block_id)
    sym = library.get(new_symbol)
    new_arity = sym.attachment.arity

    with atomic(scheme):
        return _replace_block_inner(scheme, block, sym, new_symbol, new_arity,
                                    block_id)


def _replace_block_inner(scheme, block, sym, new_symbol, new_arity, block_id):
    from .model import drop_degenerate_dimensions

    dropped = block.attachments[new_arity:]
    kept = block.attachments[:new_arity]
    if sym.attachment.kind != "axial":
        # angular/tee symbols sit on a pipe-end junction
        for pid in kept:
            pipe = scheme.pipe(pid)
            if not (pipe.a.is_close(block.position)
                    or pipe.b.is_close(block.position)):
                raise RaysIncompatible(
                    f"pipe {pid} has no end at the block position")
    if dropped:
        junction = block.position
        for cid in [c.id for c in scheme.connections.values()
                    if _is_junction_pair(scheme, c, junction)
                    and (c.e1.pipe in dropped or c.e2.pipe in dropped)
                    and {c.e1.pipe, c.e2.pipe} <= set(block.attachments)]:
            del scheme.connections[cid]
        for dim in scheme.dimensions.values():
            dim.origins = [o for o in dim.origins
                           if not (hasattr(o, "slot") and o.block == block_id
                                   and o.slot >= new_arity)]
    block.symbol = new_symbol
    block.attach_kind = sym.attachment.kind
    block.attachments = kept
    block.cut_intervals = {p: iv for p, iv in block.cut_intervals.items() if p in kept}

    if sym.attachment.kind == "axial":
        host = scheme.pipe(kept[0])
        center_t = segment_param_of_point(block.position, host.a, host.b)
        block.position = host.point_at(center_t)
        iv = cut_interval_for_axial(host, center_t, sym.attachment.cut)
        _check_cut_free(scheme, kept[0], iv, ignore_block=block_id)
        block.cut_lengths = [sym.attachment.cut]
        block.cut_intervals = {kept[0]: iv}
        axes = [host.direction()]
    else:
        junction = block.position
        dirs = [outward_direction(scheme, p, junction) for p in kept]
        block.cut_lengths = []
        block.cut_intervals = {}
        for k, pid in enumerate(kept):
            ray = sym.attachment.rays[min(k, len(sym.attachment.rays) - 1)]
            iv = cut_interval_from_junction(scheme.pipe(pid), junction, ray.length)
            _check_cut_free(scheme, pid, iv, ignore_block=block_id)
            block.cut_lengths.append(ray.length)
            block.cut_intervals[pid] = iv
        axes = _independent_axes(dirs)
    variants = enumerate_orientations(sym, axes)
    if variants:
        var = nearest_variant(variants, block.u, block.v, block.n)
        block.u, block.v, block.n = var.u, var.v, var.n
    # cut geometry moved the attachment points; dimensions may degenerate
    drop_degenerate_dimensions(scheme)
    return block_id


def _is_junction_pair(scheme: Scheme, conn: Connection, junction: Point3) -> bool:
    return (conn.e1.point(scheme).is_close(junction)
            and conn.e2.point(scheme).is_close(junction))
