"""Document model: object stores, identifier allocation, the reference graph
with its deletion-closure rules, integrity checking and picking.

Every other kernel module mutates a scheme only through the operations built
on top of these stores; after any public operation ``integrity_check`` must
come back empty.
"""

from __future__ import annotations

import copy
from contextlib import contextmanager
from dataclasses import dataclass, field

from .errors import UnknownId, ZeroLengthPipe
from .geometry import (
    EPS,
    FRAME_TOL,
    AXIS_NAMES,
    Point3,
    Vec2,
    segment_point_dist_2d,
    v2_add,
    v2_norm,
    v2_sub,
)

# Object classes stored in a scheme; visibility settings carry one entry each.
OBJECT_CLASSES = (
    "pipe", "connection", "block", "dimension", "text",
    "designator", "height_mark", "offset", "grid",
)

# Paper-space pick radius, mm.
PICK_RADIUS = 3.0

ARITY_BY_ATTACH_KIND = {"axial": 1, "angular": 2, "tee": 3}

# Flange-kit slot semantics, slot 1 first.
FLANGE_SLOT_ROLES = ("block", "studs", "nuts", "washers", "gaskets")


@dataclass(frozen=True)
class PipeEndRef:
    """Addressable end of a pipe: ``end`` is "a" or "b"."""

    pipe: int
    end: str

    def __post_init__(self):
        if self.end not in ("a", "b"):
            raise ValueError(f"bad end selector {self.end!r}")

    def point(self, scheme: "Scheme") -> Point3:
        p = scheme.pipe(self.pipe)
        return p.a if self.end == "a" else p.b

    def key(self) -> tuple[int, str]:
        return (self.pipe, self.end)

    def to_dict(self) -> dict:
        return {"pipe": self.pipe, "end": self.end}

    @staticmethod
    def from_dict(d: dict) -> "PipeEndRef":
        return PipeEndRef(pipe=int(d["pipe"]), end=d["end"])


@dataclass(frozen=True)
class BlockAttachRef:
    """Attachment point of a block, addressed by slot index."""

    block: int
    slot: int

    def point(self, scheme: "Scheme") -> Point3:
        return scheme.block(self.block).attachment_point(scheme, self.slot)

    def to_dict(self) -> dict:
        return {"block": self.block, "slot": self.slot}

    @staticmethod
    def from_dict(d: dict) -> "BlockAttachRef":
        return BlockAttachRef(block=int(d["block"]), slot=int(d["slot"]))


DimOrigin = PipeEndRef | BlockAttachRef


def dim_origin_to_dict(o: DimOrigin) -> dict:
    if isinstance(o, PipeEndRef):
        return {"kind": "pipe_end", **o.to_dict()}
    return {"kind": "block_attach", **o.to_dict()}


def dim_origin_from_dict(d: dict) -> DimOrigin:
    if d["kind"] == "pipe_end":
        return PipeEndRef.from_dict(d)
    if d["kind"] == "block_attach":
        return BlockAttachRef.from_dict(d)
    raise ValueError(f"bad dimension origin kind {d['kind']!r}")


@dataclass
class Pipe:
    """Straight centerline segment; |b - a| must exceed EPS."""

    id: int
    a: Point3
    b: Point3
    visible: bool = True
    designator: int | None = None

    def length(self) -> float:
        return self.a.dist(self.b)

    def direction(self) -> Point3:
        return (self.b - self.a).unit()

    def point_at(self, t: float) -> Point3:
        return self.a.lerp(self.b, t)

    def end_point(self, end: str) -> Point3:
        return self.a if end == "a" else self.b

    def to_dict(self) -> dict:
        return {
            "a": self.a.to_list(), "b": self.b.to_list(),
            "visible": self.visible, "designator": self.designator,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "Pipe":
        return Pipe(
            id=oid, a=Point3.from_list(d["a"]), b=Point3.from_list(d["b"]),
            visible=bool(d.get("visible", True)),
            designator=d.get("designator"),
        )


@dataclass
class Connection:
    """Pairwise link of two coincident pipe ends; the pair is unordered."""

    id: int
    e1: PipeEndRef
    e2: PipeEndRef

    def __post_init__(self):
        # store in canonical order so (e1,e2) and (e2,e1) are one object
        if self.e2.key() < self.e1.key():
            self.e1, self.e2 = self.e2, self.e1

    def pair_key(self) -> tuple:
        return (self.e1.key(), self.e2.key())

    def pipes(self) -> tuple[int, int]:
        return (self.e1.pipe, self.e2.pipe)

    def other_end(self, pipe: int) -> PipeEndRef:
        return self.e2 if self.e1.pipe == pipe else self.e1

    def to_dict(self) -> dict:
        return {"e1": self.e1.to_dict(), "e2": self.e2.to_dict()}

    @staticmethod
    def from_dict(oid: int, d: dict) -> "Connection":
        return Connection(id=oid, e1=PipeEndRef.from_dict(d["e1"]),
                          e2=PipeEndRef.from_dict(d["e2"]))


@dataclass
class BlockInstance:
    """A placed library symbol bound to one, two or three pipes.

    ``attach_kind`` and per-slot ``cut_lengths`` are copied from the symbol
    definition at placement time so the document stays checkable without the
    library. ``cut_intervals`` maps an attached pipe id to the parameter
    interval hidden under the block.
    """

    id: int
    symbol: str
    attach_kind: str
    position: Point3
    u: Point3
    v: Point3
    n: Point3
    attachments: list[int] = field(default_factory=list)
    cut_lengths: list[float] = field(default_factory=list)
    cut_intervals: dict[int, tuple[float, float]] = field(default_factory=dict)
    scale: float = 1.0
    designator: int | None = None

    @property
    def arity(self) -> int:
        return ARITY_BY_ATTACH_KIND[self.attach_kind]

    def frame_vectors(self) -> tuple[Point3, Point3, Point3]:
        return (self.u, self.v, self.n)

    def attachment_point(self, scheme: "Scheme", slot: int) -> Point3:
        """3D point where slot's pipe meets the block.

        Axial blocks attach at the block position; angular/tee slots attach
        at the inner end of that pipe's cut interval.
        """
        pid = self.attachments[slot]
        if self.attach_kind == "axial":
            return self.position
        pipe = scheme.pipe(pid)
        t0, t1 = self.cut_intervals[pid]
        p0, p1 = pipe.point_at(t0), pipe.point_at(t1)
        # the junction end coincides with the block position; return the other
        if p0.dist(self.position) <= p1.dist(self.position):
            return p1
        return p0

    def attachment_points(self, scheme: "Scheme") -> list[Point3]:
        pts = [self.position]
        if self.attach_kind != "axial":
            pts += [self.attachment_point(scheme, s)
                    for s in range(len(self.attachments))]
        return pts

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol, "attachKind": self.attach_kind,
            "position": self.position.to_list(),
            "u": self.u.to_list(), "v": self.v.to_list(), "n": self.n.to_list(),
            "attachments": list(self.attachments),
            "cutLengths": list(self.cut_lengths),
            "cutIntervals": {str(p): list(iv) for p, iv in self.cut_intervals.items()},
            "scale": self.scale, "designator": self.designator,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "BlockInstance":
        return BlockInstance(
            id=oid, symbol=d["symbol"], attach_kind=d["attachKind"],
            position=Point3.from_list(d["position"]),
            u=Point3.from_list(d["u"]), v=Point3.from_list(d["v"]),
            n=Point3.from_list(d["n"]),
            attachments=[int(p) for p in d["attachments"]],
            cut_lengths=[float(c) for c in d["cutLengths"]],
            cut_intervals={int(p): (float(iv[0]), float(iv[1]))
                           for p, iv in d["cutIntervals"].items()},
            scale=float(d.get("scale", 1.0)),
            designator=d.get("designator"),
        )


@dataclass
class ChainDimension:
    """Chain of aligned dimension values between extension-line origins."""

    id: int
    origins: list[DimOrigin]
    axis: int                 # 0=x, 1=y, 2=z
    side: int                 # +1 / -1 placement of the dimension line
    offset: float             # paper mm from the chain

    def origin_points(self, scheme: "Scheme") -> list[Point3]:
        return [o.point(scheme) for o in self.origins]

    def values(self, scheme: "Scheme") -> list[float]:
        """Measured segment values: diffs of distinct sorted axis coordinates."""
        coords = sorted(p.component(self.axis) for p in self.origin_points(scheme))
        distinct = [coords[0]]
        for c in coords[1:]:
            if c - distinct[-1] > EPS:
                distinct.append(c)
        return [b - a for a, b in zip(distinct, distinct[1:])]

    def to_dict(self) -> dict:
        return {
            "origins": [dim_origin_to_dict(o) for o in self.origins],
            "axis": AXIS_NAMES[self.axis], "side": self.side, "offset": self.offset,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "ChainDimension":
        return ChainDimension(
            id=oid,
            origins=[dim_origin_from_dict(o) for o in d["origins"]],
            axis=AXIS_NAMES.index(d["axis"]), side=int(d["side"]),
            offset=float(d["offset"]),
        )


@dataclass
class Leader:
    """Arrowed reference line from an annotation to a pipe point or a block."""

    anchor: Vec2
    pipe: int | None = None
    t: float | None = None
    block: int | None = None

    def target_id(self) -> int:
        return self.pipe if self.pipe is not None else self.block

    def targets_pipe(self) -> bool:
        return self.pipe is not None

    def point(self, scheme: "Scheme") -> Point3:
        if self.pipe is not None:
            return scheme.pipe(self.pipe).point_at(self.t)
        return scheme.block(self.block).position

    def to_dict(self) -> dict:
        d: dict = {"anchor": list(self.anchor)}
        if self.pipe is not None:
            d["pipe"] = self.pipe
            d["t"] = self.t
        else:
            d["block"] = self.block
        return d

    @staticmethod
    def from_dict(d: dict) -> "Leader":
        if "pipe" in d and d["pipe"] is not None:
            return Leader(anchor=tuple(d["anchor"]), pipe=int(d["pipe"]),
                          t=float(d["t"]))
        return Leader(anchor=tuple(d["anchor"]), block=int(d["block"]))


@dataclass
class TextAnnotation:
    """Free text with one or more leaders; the main leader carries the shelf."""

    id: int
    text: str
    leaders: list[Leader]
    main_leader: int = 0

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "leaders": [l.to_dict() for l in self.leaders],
            "mainLeader": self.main_leader,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "TextAnnotation":
        return TextAnnotation(
            id=oid, text=d["text"],
            leaders=[Leader.from_dict(l) for l in d["leaders"]],
            main_leader=int(d.get("mainLeader", 0)),
        )


@dataclass
class PositionDesignator:
    """Grouped balloon of 1..5 position numbers on a pipe or block."""

    id: int
    positions: list[int]
    leaders: list[Leader]
    main_leader: int = 0
    target_pipe: int | None = None
    target_block: int | None = None

    def target_id(self) -> int:
        return self.target_pipe if self.target_pipe is not None else self.target_block

    def to_dict(self) -> dict:
        return {
            "positions": list(self.positions),
            "leaders": [l.to_dict() for l in self.leaders],
            "mainLeader": self.main_leader,
            "targetPipe": self.target_pipe, "targetBlock": self.target_block,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "PositionDesignator":
        return PositionDesignator(
            id=oid, positions=[int(p) for p in d["positions"]],
            leaders=[Leader.from_dict(l) for l in d["leaders"]],
            main_leader=int(d.get("mainLeader", 0)),
            target_pipe=d.get("targetPipe"), target_block=d.get("targetBlock"),
        )


@dataclass
class HeightMark:
    """Elevation annotation tied to a pipe point; level displayed in meters."""

    id: int
    pipe: int
    t: float
    level: float

    def point(self, scheme: "Scheme") -> Point3:
        return scheme.pipe(self.pipe).point_at(self.t)

    def to_dict(self) -> dict:
        return {"pipe": self.pipe, "t": self.t, "level": self.level}

    @staticmethod
    def from_dict(oid: int, d: dict) -> "HeightMark":
        return HeightMark(id=oid, pipe=int(d["pipe"]), t=float(d["t"]),
                          level=float(d["level"]))


@dataclass
class OffsetSpec:
    """Render-time displacement of a half-space (global) or branch (local).

    The anchor point and the anchor pipe's direction define the boundary
    plane; ``sign`` picks the displaced half-space. Local offsets displace
    only the branch of ``scope_pipe`` and draw break glyphs on ``broken``
    pipes at their break parameters. Model coordinates never change.
    """

    id: int
    kind: str                      # "global" | "local"
    anchor_pipe: int
    anchor_t: float
    sign: int                      # +1 toward pipe b, -1 toward a
    shift: Vec2                    # paper mm
    broken: list[tuple[int, float]] = field(default_factory=list)
    scope_pipe: int | None = None

    def anchor_point(self, scheme: "Scheme") -> Point3:
        return scheme.pipe(self.anchor_pipe).point_at(self.anchor_t)

    def plane_normal(self, scheme: "Scheme") -> Point3:
        d = scheme.pipe(self.anchor_pipe).direction()
        return d.scaled(float(self.sign))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "anchorPipe": self.anchor_pipe,
            "anchorT": self.anchor_t, "sign": self.sign,
            "shift": list(self.shift),
            "broken": [[p, t] for p, t in self.broken],
            "scopePipe": self.scope_pipe,
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "OffsetSpec":
        return OffsetSpec(
            id=oid, kind=d["kind"], anchor_pipe=int(d["anchorPipe"]),
            anchor_t=float(d["anchorT"]), sign=int(d["sign"]),
            shift=tuple(d["shift"]),
            broken=[(int(p), float(t)) for p, t in d.get("broken", [])],
            scope_pipe=d.get("scopePipe"),
        )


@dataclass
class ConstructionGrid:
    """Labeled building-axis families imported from the plan."""

    id: int
    letter_axes: list[tuple[str, float]] = field(default_factory=list)
    number_axes: list[tuple[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "letterAxes": [[l, o] for l, o in self.letter_axes],
            "numberAxes": [[l, o] for l, o in self.number_axes],
        }

    @staticmethod
    def from_dict(oid: int, d: dict) -> "ConstructionGrid":
        return ConstructionGrid(
            id=oid,
            letter_axes=[(str(l), float(o)) for l, o in d["letterAxes"]],
            number_axes=[(str(l), float(o)) for l, o in d["numberAxes"]],
        )


@dataclass
class SpecRow:
    """Specifying properties of one position number."""

    position: int
    name: str = ""
    type_brand: str = ""
    code: str = ""
    unit: str = ""
    quantity: float = 0.0
    catalog_ref: str = ""
    extra: dict = field(default_factory=dict)

    EDITABLE_FIELDS = ("name", "type_brand", "code", "unit", "catalog_ref")

    def assigned_fields(self) -> list[str]:
        """Names of filled-in properties besides position and quantity."""
        out = [f for f in self.EDITABLE_FIELDS if getattr(self, f)]
        out += [k for k, v in sorted(self.extra.items()) if v]
        return out

    def to_dict(self) -> dict:
        return {
            "position": self.position, "name": self.name,
            "typeBrand": self.type_brand, "code": self.code, "unit": self.unit,
            "quantity": self.quantity, "catalogRef": self.catalog_ref,
            "extra": dict(self.extra),
        }

    @staticmethod
    def from_dict(d: dict) -> "SpecRow":
        return SpecRow(
            position=int(d["position"]), name=d.get("name", ""),
            type_brand=d.get("typeBrand", ""), code=d.get("code", ""),
            unit=d.get("unit", ""), quantity=float(d.get("quantity", 0.0)),
            catalog_ref=d.get("catalogRef", ""), extra=dict(d.get("extra", {})),
        )


@dataclass
class SchemeSettings:
    """Per-document settings: projection, visibility, library, numbering."""

    projection: "object" = None          # projection.Projection
    visibility: dict[str, bool] = field(default_factory=dict)
    library: str = ""
    numbering: str = "auto"              # "auto" | "manual"
    floor_label: str = ""
    placement: Vec2 = (0.0, 0.0)         # drawing origin on the sheet, paper mm

    def __post_init__(self):
        from .projection import ISOMETRIC
        if self.projection is None:
            self.projection = ISOMETRIC
        for cls in OBJECT_CLASSES:
            self.visibility.setdefault(cls, True)

    def to_dict(self) -> dict:
        return {
            "projection": self.projection.to_dict(),
            "visibility": dict(self.visibility),
            "library": self.library, "numbering": self.numbering,
            "floorLabel": self.floor_label, "placement": list(self.placement),
        }

    @staticmethod
    def from_dict(d: dict) -> "SchemeSettings":
        from .projection import Projection
        return SchemeSettings(
            projection=Projection.from_dict(d["projection"]),
            visibility={k: bool(v) for k, v in d["visibility"].items()},
            library=d.get("library", ""), numbering=d.get("numbering", "auto"),
            floor_label=d.get("floorLabel", ""),
            placement=tuple(d.get("placement", (0.0, 0.0))),
        )


@dataclass
class Violation:
    """One integrity finding; violations are data, not exceptions."""

    code: str
    obj: int | None = None
    detail: str = ""

    def __repr__(self):
        where = f" #{self.obj}" if self.obj is not None else ""
        return f"<{self.code}{where}: {self.detail}>"


class Scheme:
    """The document: one store per object class plus settings and the id
    counter. Ids are monotonically increasing and never reused."""

    def __init__(self, settings: SchemeSettings | None = None):
        self.pipes: dict[int, Pipe] = {}
        self.connections: dict[int, Connection] = {}
        self.blocks: dict[int, BlockInstance] = {}
        self.dimensions: dict[int, ChainDimension] = {}
        self.texts: dict[int, TextAnnotation] = {}
        self.designators: dict[int, PositionDesignator] = {}
        self.height_marks: dict[int, HeightMark] = {}
        self.offsets: dict[int, OffsetSpec] = {}
        self.grids: dict[int, ConstructionGrid] = {}
        self.spec_rows: dict[int, SpecRow] = {}      # keyed by position number
        self.settings = settings or SchemeSettings()
        self.next_id = 1

    # -- store access ------------------------------------------------------

    def store(self, kind: str) -> dict:
        return {
            "pipe": self.pipes, "connection": self.connections,
            "block": self.blocks, "dimension": self.dimensions,
            "text": self.texts, "designator": self.designators,
            "height_mark": self.height_marks, "offset": self.offsets,
            "grid": self.grids,
        }[kind]

    def stores(self):
        for kind in OBJECT_CLASSES:
            yield kind, self.store(kind)

    def new_id(self) -> int:
        oid = self.next_id
        self.next_id += 1
        return oid

    def alive(self, oid: int) -> bool:
        return any(oid in store for _, store in self.stores())

    def kind_of(self, oid: int) -> str:
        for kind, store in self.stores():
            if oid in store:
                return kind
        raise UnknownId(f"no object with id {oid}")

    def pipe(self, pid: int) -> Pipe:
        try:
            return self.pipes[pid]
        except KeyError:
            raise UnknownId(f"no pipe with id {pid}") from None

    def block(self, bid: int) -> BlockInstance:
        try:
            return self.blocks[bid]
        except KeyError:
            raise UnknownId(f"no block with id {bid}") from None

    def connection(self, cid: int) -> Connection:
        try:
            return self.connections[cid]
        except KeyError:
            raise UnknownId(f"no connection with id {cid}") from None

    def snapshot(self) -> "Scheme":
        """Deep, independent copy for reads and previews."""
        return copy.deepcopy(self)

    # -- primitive inserts -------------------------------------------------

    def add_pipe(self, a: Point3, b: Point3) -> int:
        """Store a new pipe; no connections are created."""
        if a.dist(b) <= EPS:
            raise ZeroLengthPipe(f"|b-a| = {a.dist(b):g} mm is below tolerance")
        pid = self.new_id()
        self.pipes[pid] = Pipe(id=pid, a=a, b=b)
        return pid

    def connections_at_end(self, ref: PipeEndRef) -> list[Connection]:
        return [c for c in self.connections.values()
                if ref.key() in (c.e1.key(), c.e2.key())]

    def connections_of_pipe(self, pid: int) -> list[Connection]:
        return [c for c in self.connections.values() if pid in c.pipes()]

    def blocks_on_pipe(self, pid: int) -> list[BlockInstance]:
        return [b for b in self.blocks.values() if pid in b.attachments]

    def ends_at_point(self, pt: Point3, tol: float = EPS) -> list[PipeEndRef]:
        """All pipe ends coincident with pt, ordered by (pipe id, end)."""
        out = []
        for pid in sorted(self.pipes):
            pipe = self.pipes[pid]
            for end in ("a", "b"):
                if pipe.end_point(end).is_close(pt, tol):
                    out.append(PipeEndRef(pid, end))
        return out

    def used_position_numbers(self) -> set[int]:
        used: set[int] = set()
        for d in self.designators.values():
            used.update(d.positions)
        return used


@contextmanager
def atomic(scheme: Scheme):
    """Roll the scheme back if the block raises; makes operations
    all-or-nothing."""
    backup = copy.deepcopy(scheme.__dict__)
    try:
        yield
    except Exception:
        scheme.__dict__.clear()
        scheme.__dict__.update(backup)
        raise


# ---------------------------------------------------------------------------
# reference closure


def _leader_dead(leader: Leader, doomed: set[int]) -> bool:
    return leader.target_id() in doomed


def _dim_origin_dead(scheme: Scheme, origin: DimOrigin, doomed: set[int]) -> bool:
    if isinstance(origin, PipeEndRef):
        return origin.pipe in doomed
    if origin.block in doomed:
        return True
    block = scheme.blocks.get(origin.block)
    if block is None or origin.slot >= len(block.attachments):
        return True
    # the slot's anchor vanishes with its pipe even when the block survives
    return block.attachments[origin.slot] in doomed


def _dim_survives(scheme: Scheme, dim: ChainDimension, doomed: set[int]) -> bool:
    """A dimension survives while >=2 origins remain and the survivors still
    spread along its measurement axis."""
    kept = [o for o in dim.origins if not _dim_origin_dead(scheme, o, doomed)]
    if len(kept) < 2:
        return False
    coords = [o.point(scheme).component(dim.axis) for o in kept]
    return max(coords) - min(coords) > EPS


def reference_closure(scheme: Scheme, seed: set[int],
                      block_rule: str = "prune") -> set[int]:
    """Minimal superset of seed whose deletion leaves no dangling reference.

    Survival rules: dimensions prune dead origins while the rest still make a
    measurable chain; texts and designators prune dead leaders while at least
    one remains; blocks prune dead attachments while one pipe remains (with
    ``block_rule="cascade"`` a block dies as soon as any attached pipe dies);
    connections and height marks always follow their pipes.
    """
    for oid in seed:
        if not scheme.alive(oid):
            raise UnknownId(f"seed id {oid} is not a live object")
    doomed = set(seed)
    changed = True
    while changed:
        changed = False
        for cid, conn in scheme.connections.items():
            if cid not in doomed and (conn.e1.pipe in doomed or conn.e2.pipe in doomed):
                doomed.add(cid)
                changed = True
        for hid, mark in scheme.height_marks.items():
            if hid not in doomed and mark.pipe in doomed:
                doomed.add(hid)
                changed = True
        for bid, block in scheme.blocks.items():
            if bid in doomed:
                continue
            dead = [p for p in block.attachments if p in doomed]
            if not dead:
                continue
            if block_rule == "cascade" or len(dead) == len(block.attachments):
                doomed.add(bid)
                changed = True
        for did, dim in scheme.dimensions.items():
            if did not in doomed and not _dim_survives(scheme, dim, doomed):
                doomed.add(did)
                changed = True
        for tid, text in scheme.texts.items():
            if tid in doomed:
                continue
            if all(_leader_dead(l, doomed) for l in text.leaders):
                doomed.add(tid)
                changed = True
        for gid, desig in scheme.designators.items():
            if gid in doomed:
                continue
            if all(_leader_dead(l, doomed) for l in desig.leaders):
                doomed.add(gid)
                changed = True
        for oid, off in scheme.offsets.items():
            if oid in doomed:
                continue
            if off.anchor_pipe in doomed or (
                    off.kind == "local" and off.scope_pipe in doomed):
                doomed.add(oid)
                changed = True
    return doomed


def apply_deletion(scheme: Scheme, doomed: set[int]) -> list[str]:
    """Delete a closed set and prune survivors' references to it.

    ``doomed`` must be closure-complete (output of reference_closure); the
    caller gets back a list of human-readable warnings for side effects.
    """
    warnings: list[str] = []
    # decide dimension-origin survival against the pre-deletion stores
    dim_keep: dict[int, list[DimOrigin]] = {}
    for did, dim in scheme.dimensions.items():
        if did not in doomed:
            dim_keep[did] = [o for o in dim.origins
                             if not _dim_origin_dead(scheme, o, doomed)]
    for kind, store in list(scheme.stores()):
        for oid in [o for o in store if o in doomed]:
            del store[oid]
    for text in scheme.texts.values():
        _prune_leaders(text, doomed, warnings, "text")
    for desig in scheme.designators.values():
        _prune_leaders(desig, doomed, warnings, "designator")
        if desig.target_id() in doomed:
            lead = desig.leaders[0]
            desig.target_pipe = lead.pipe
            desig.target_block = lead.block
            warnings.append(f"designator {desig.id}: re-targeted")
    slot_maps: dict[int, dict[int, int]] = {}
    for block in scheme.blocks.values():
        if any(p in doomed for p in block.attachments):
            remap: dict[int, int] = {}
            attach: list[int] = []
            lengths: list[float] = []
            for i, p in enumerate(block.attachments):
                if p in doomed:
                    continue
                remap[i] = len(attach)
                attach.append(p)
                lengths.append(block.cut_lengths[i])
            slot_maps[block.id] = remap
            block.attachments = attach
            block.cut_lengths = lengths
            block.cut_intervals = {p: iv for p, iv in block.cut_intervals.items()
                                   if p not in doomed}
            warnings.append(f"block {block.id}: pruned attachments")
        if block.designator in doomed:
            block.designator = None
    for did, dim in scheme.dimensions.items():
        fixed: list[DimOrigin] = []
        for o in dim_keep[did]:
            if isinstance(o, BlockAttachRef) and o.block in slot_maps:
                o = BlockAttachRef(o.block, slot_maps[o.block][o.slot])
            fixed.append(o)
        if len(fixed) != len(dim.origins):
            warnings.append(f"dimension {did}: pruned origins")
        dim.origins = fixed
    for pipe in scheme.pipes.values():
        if pipe.designator in doomed:
            pipe.designator = None
    for off in scheme.offsets.values():
        kept = [(p, t) for p, t in off.broken if p not in doomed]
        if len(kept) != len(off.broken):
            off.broken = kept
            warnings.append(f"offset {off.id}: pruned break lines")
    return warnings


# ---------------------------------------------------------------------------
# integrity


def integrity_check(scheme: Scheme) -> list[Violation]:
    """All type-invariant and referential-closure violations in the scheme."""
    out: list[Violation] = []
    seen: dict[int, str] = {}
    for kind, store in scheme.stores():
        for oid, obj in store.items():
            if oid in seen:
                out.append(Violation("DuplicateId", oid,
                                     f"{kind} reuses id of {seen[oid]}"))
            seen[oid] = kind
            if oid != obj.id:
                out.append(Violation("IdMismatch", oid, f"{kind} stored under wrong key"))
            if oid >= scheme.next_id:
                out.append(Violation("IdAboveCounter", oid, kind))

    def ref(owner: int, oid: int | None, kind: str, what: str):
        if oid is not None and oid not in scheme.store(kind):
            out.append(Violation("DanglingRef", owner, f"{what} -> {kind} {oid}"))
            return False
        return True

    for pid, pipe in scheme.pipes.items():
        if not (pipe.a.is_finite() and pipe.b.is_finite()):
            out.append(Violation("NonFiniteCoord", pid, "pipe"))
        elif pipe.length() <= EPS:
            out.append(Violation("ZeroLengthPipe", pid, f"length {pipe.length():g}"))
        ref(pid, pipe.designator, "designator", "pipe.designator")

    pair_keys: dict[tuple, int] = {}
    for cid, conn in scheme.connections.items():
        ok = ref(cid, conn.e1.pipe, "pipe", "connection.e1") and \
             ref(cid, conn.e2.pipe, "pipe", "connection.e2")
        if not ok:
            continue
        if conn.e1.pipe == conn.e2.pipe:
            out.append(Violation("SamePipe", cid, "connection joins one pipe to itself"))
        if conn.pair_key() in pair_keys:
            out.append(Violation("DuplicateConnection", cid,
                                 f"same pair as {pair_keys[conn.pair_key()]}"))
        pair_keys.setdefault(conn.pair_key(), cid)
        d = conn.e1.point(scheme).dist(conn.e2.point(scheme))
        if d > EPS:
            out.append(Violation("EndsNotCoincident", cid, f"gap {d:g} mm"))

    cuts_per_pipe: dict[int, list[tuple[float, float, int]]] = {}
    for bid, block in scheme.blocks.items():
        u, v, n = block.frame_vectors()
        frame_ok = (abs(u.norm() - 1) <= FRAME_TOL and abs(v.norm() - 1) <= FRAME_TOL
                    and abs(n.norm() - 1) <= FRAME_TOL
                    and abs(u.dot(v)) <= FRAME_TOL and abs(u.dot(n)) <= FRAME_TOL
                    and abs(v.dot(n)) <= FRAME_TOL)
        if not frame_ok:
            out.append(Violation("BadFrame", bid, "frame not orthonormal"))
        if len(block.attachments) > block.arity:
            out.append(Violation("TooManyAttachments", bid,
                                 f"{len(block.attachments)} > {block.arity}"))
        if len(set(block.attachments)) != len(block.attachments):
            out.append(Violation("RepeatedAttachment", bid, "same pipe twice"))
        if len(block.cut_lengths) != len(block.attachments):
            out.append(Violation("CutLengthMismatch", bid, "one length per slot"))
        for p in block.attachments:
            ref(bid, p, "pipe", "block.attachment")
        ref(bid, block.designator, "designator", "block.designator")
        for p, (t0, t1) in block.cut_intervals.items():
            if p not in block.attachments:
                out.append(Violation("CutWithoutAttachment", bid, f"pipe {p}"))
            if not (0.0 <= t0 <= t1 <= 1.0):
                out.append(Violation("BadCutInterval", bid, f"[{t0:g},{t1:g}]"))
            if p in scheme.pipes:
                cuts_per_pipe.setdefault(p, []).append((t0, t1, bid))
    for pid, intervals in cuts_per_pipe.items():
        intervals.sort()
        for (a0, a1, ba), (b0, b1, bb) in zip(intervals, intervals[1:]):
            if b0 < a1 - 1e-9:
                out.append(Violation("CutOverlap", pid,
                                     f"blocks {ba} and {bb} overlap"))

    for did, dim in scheme.dimensions.items():
        live = True
        for o in dim.origins:
            if isinstance(o, PipeEndRef):
                live &= ref(did, o.pipe, "pipe", "dimension.origin")
            else:
                if ref(did, o.block, "block", "dimension.origin"):
                    if o.slot >= len(scheme.blocks[o.block].attachments):
                        out.append(Violation("BadAttachSlot", did,
                                             f"block {o.block} slot {o.slot}"))
                        live = False
                else:
                    live = False
        if len(dim.origins) < 2:
            out.append(Violation("TooFewOrigins", did, f"{len(dim.origins)} origins"))
        elif live:
            coords = [p.component(dim.axis) for p in dim.origin_points(scheme)]
            if max(coords) - min(coords) <= EPS:
                out.append(Violation("DegenerateDimension", did,
                                     f"no spread along {AXIS_NAMES[dim.axis]}"))

    for tid, text in scheme.texts.items():
        _check_leaders(scheme, out, tid, text.leaders, text.main_leader, "text")

    pos_seen: dict[int, int] = {}
    for gid, desig in scheme.designators.items():
        _check_leaders(scheme, out, gid, desig.leaders, desig.main_leader, "designator")
        if not (1 <= len(desig.positions) <= 5):
            out.append(Violation("BadPositionCount", gid, f"{len(desig.positions)}"))
        if any(p <= 0 for p in desig.positions):
            out.append(Violation("BadPositionNumber", gid, "positions must be positive"))
        if len(set(desig.positions)) != len(desig.positions):
            out.append(Violation("DuplicatePosition", gid, "repeated number in one balloon"))
        if (desig.target_pipe is None) == (desig.target_block is None):
            out.append(Violation("BadDesignatorTarget", gid, "needs pipe xor block"))
        elif desig.target_pipe is not None:
            if ref(gid, desig.target_pipe, "pipe", "designator.target"):
                if scheme.pipes[desig.target_pipe].designator != gid:
                    out.append(Violation("BacklinkBroken", gid,
                                         f"pipe {desig.target_pipe}"))
        else:
            if ref(gid, desig.target_block, "block", "designator.target"):
                if scheme.blocks[desig.target_block].designator != gid:
                    out.append(Violation("BacklinkBroken", gid,
                                         f"block {desig.target_block}"))
        for p in desig.positions:
            pos_seen.setdefault(p, gid)

    for hid, mark in scheme.height_marks.items():
        if ref(hid, mark.pipe, "pipe", "height_mark.pipe"):
            if not (0.0 <= mark.t <= 1.0):
                out.append(Violation("BadParameterRange", hid, f"t={mark.t:g}"))

    for oid, off in scheme.offsets.items():
        ref(oid, off.anchor_pipe, "pipe", "offset.anchor")
        if off.kind not in ("global", "local"):
            out.append(Violation("BadOffsetKind", oid, off.kind))
        if v2_norm(off.shift) == 0.0:
            out.append(Violation("ZeroShift", oid, "offset with no displacement"))
        if off.kind == "local":
            if off.scope_pipe is None:
                out.append(Violation("MissingScope", oid, "local offset needs a branch"))
            else:
                ref(oid, off.scope_pipe, "pipe", "offset.scope")
        for p, t in off.broken:
            ref(oid, p, "pipe", "offset.broken")
            if not (0.0 < t < 1.0):
                out.append(Violation("BadParameterRange", oid, f"break t={t:g}"))

    for gid, grid in scheme.grids.items():
        for fam_name, fam in (("letters", grid.letter_axes),
                              ("numbers", grid.number_axes)):
            labels = [l for l, _ in fam]
            if len(set(labels)) != len(labels):
                out.append(Violation("DuplicateGridLabel", gid, fam_name))

    for cls in OBJECT_CLASSES:
        if cls not in scheme.settings.visibility:
            out.append(Violation("MissingVisibilityEntry", None, cls))
    return out


def drop_degenerate_dimensions(scheme: Scheme,
                               warnings: list[str] | None = None) -> set[int]:
    """Delete dimensions that lost their measurable chain (fewer than two
    origins, a dead origin slot, or no spread along the measurement axis)."""
    doomed = set()
    for did, dim in scheme.dimensions.items():
        live = []
        for o in dim.origins:
            if isinstance(o, BlockAttachRef):
                block = scheme.blocks.get(o.block)
                if block is None or o.slot >= len(block.attachments):
                    continue
            elif o.pipe not in scheme.pipes:
                continue
            live.append(o)
        if len(live) != len(dim.origins):
            dim.origins = live
        if len(dim.origins) < 2:
            doomed.add(did)
            continue
        coords = [p.component(dim.axis) for p in dim.origin_points(scheme)]
        if max(coords) - min(coords) <= EPS:
            doomed.add(did)
    for did in doomed:
        del scheme.dimensions[did]
        if warnings is not None:
            warnings.append(f"dimension {did}: degenerated, removed")
    return doomed


def _prune_leaders(obj, doomed: set[int], warnings: list[str], kind: str) -> None:
    kept = [l for l in obj.leaders if not _leader_dead(l, doomed)]
    if len(kept) == len(obj.leaders):
        return
    old_main = obj.leaders[obj.main_leader]
    obj.leaders = kept
    if old_main in kept:
        obj.main_leader = kept.index(old_main)
    else:
        obj.main_leader = 0
    warnings.append(f"{kind} {obj.id}: pruned leaders")


def _check_leaders(scheme: Scheme, out: list[Violation], oid: int,
                   leaders: list[Leader], main: int, kind: str) -> None:
    if not leaders:
        out.append(Violation("NoLeaders", oid, kind))
        return
    if not (0 <= main < len(leaders)):
        out.append(Violation("BadMainLeader", oid, f"index {main}"))
    for l in leaders:
        if l.targets_pipe():
            if l.pipe not in scheme.pipes:
                out.append(Violation("DanglingRef", oid, f"{kind}.leader -> pipe {l.pipe}"))
            elif not (0.0 <= l.t <= 1.0):
                out.append(Violation("BadParameterRange", oid, f"leader t={l.t:g}"))
        elif l.block not in scheme.blocks:
            out.append(Violation("DanglingRef", oid, f"{kind}.leader -> block {l.block}"))


# ---------------------------------------------------------------------------
# picking


@dataclass(frozen=True)
class PickHit:
    """One pick candidate: object kind, id, sub-object and paper distance."""

    kind: str
    id: int
    sub: str        # "body", "a", "b", "point", or a slot index as text
    dist: float


def pick(scheme: Scheme, at: Vec2, proj, classes: set[str],
         radius: float = PICK_RADIUS) -> list[PickHit]:
    """Candidates within the pick radius around a paper point, nearest first.

    Classes: pipe, pipe_end, block, dimension, text, designator, height_mark.
    Coincident pipe ends are all returned; ties order by object id.
    """
    from .render import projected_point, projected_pipe_polyline

    hits: list[PickHit] = []
    if "pipe" in classes or "pipe_end" in classes:
        for pid in sorted(scheme.pipes):
            pipe = scheme.pipes[pid]
            if "pipe" in classes:
                best = None
                for pa, pb in projected_pipe_polyline(scheme, pipe, proj):
                    d = segment_point_dist_2d(at, pa, pb)
                    if best is None or d < best:
                        best = d
                if best is not None and best <= radius:
                    hits.append(PickHit("pipe", pid, "body", best))
            if "pipe_end" in classes:
                for end in ("a", "b"):
                    img = projected_point(scheme, pipe.end_point(end), proj,
                                          owner_pipe=pid,
                                          owner_t=0.0 if end == "a" else 1.0)
                    d = v2_norm(v2_sub(at, img))
                    if d <= radius:
                        hits.append(PickHit("pipe_end", pid, end, d))
    if "block" in classes:
        for bid in sorted(scheme.blocks):
            block = scheme.blocks[bid]
            img = projected_point(scheme, block.position, proj, owner_block=bid)
            d = v2_norm(v2_sub(at, img))
            if d <= radius:
                hits.append(PickHit("block", bid, "point", d))
    if "height_mark" in classes:
        for hid in sorted(scheme.height_marks):
            mark = scheme.height_marks[hid]
            img = projected_point(scheme, mark.point(scheme), proj,
                                  owner_pipe=mark.pipe, owner_t=mark.t)
            d = v2_norm(v2_sub(at, img))
            if d <= radius:
                hits.append(PickHit("height_mark", hid, "point", d))
    if "text" in classes or "designator" in classes:
        pairs = []
        if "text" in classes:
            pairs += [("text", t) for t in scheme.texts.values()]
        if "designator" in classes:
            pairs += [("designator", g) for g in scheme.designators.values()]
        for kind, obj in pairs:
            anchor = v2_add(obj.leaders[obj.main_leader].anchor,
                            scheme.settings.placement)
            d = v2_norm(v2_sub(at, anchor))
            if d <= radius:
                hits.append(PickHit(kind, obj.id, "point", d))
    if "dimension" in classes:
        for did in sorted(scheme.dimensions):
            dim = scheme.dimensions[did]
            pts = [projected_point(scheme, p, proj)
                   for p in dim.origin_points(scheme)]
            d = min(v2_norm(v2_sub(at, p)) for p in pts)
            if d <= radius:
                hits.append(PickHit("dimension", did, "point", d))
    end_order = {"body": 0, "a": 1, "b": 2, "point": 0}
    hits.sort(key=lambda h: (h.dist, h.id, end_order.get(h.sub, 3)))
    return hits
