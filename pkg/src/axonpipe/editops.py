"""Pipe-topology editing operations: sketch, elbow, extend, point/part/branch
moves, connect/disconnect, cut/merge, deletes, replication, offsets, level
shift, whole-scheme move.

Every operation is atomic: on error the scheme is left exactly as it was.
"""

from __future__ import annotations

import copy
import logging

from .errors import (
    AlreadyConnected,
    BadInterval,
    BadParameter,
    CutCollision,
    DegenerateLine,
    DirParallelToPipe,
    DoesNotFit,
    EndConnected,
    JunctionLocked,
    NoConnections,
    NoContinuation,
    NotClosed,
    NotCoincident,
    NotCrossing,
    OffAxis,
    OffPipe,
    PointOccupied,
    SamePipe,
    ScopeForbidden,
    UnknownId,
    ZeroLengthPipe,
)
from .geometry import (
    EPS,
    AxisDir,
    Point3,
    Vec2,
    segment_param_of_point,
    segment_point_dist_3d,
    v2_add,
)
from .model import (
    BlockAttachRef,
    BlockInstance,
    Connection,
    Leader,
    OffsetSpec,
    Pipe,
    PipeEndRef,
    Scheme,
    apply_deletion,
    atomic as _atomic,
    reference_closure,
)
from .projection import orthogonalize, project, snap
from .symbols import cut_interval_for_axial, cut_interval_from_junction

log = logging.getLogger(__name__)

COLLINEAR_TOL = 1e-6


# ---------------------------------------------------------------------------
# sketches and elbows


def sketch_line(scheme: Scheme, vertices: list[Point3],
                snap_radius: float = 0.0) -> list[int]:
    """Fast polyline input: every vertex after the first snaps to existing
    scheme points, then orthogonalizes against the previous one; surviving
    segments become pairwise-connected pipes. The line's free ends are not
    connected to any other pipe."""
    if len(vertices) < 2:
        raise DegenerateLine("a line needs at least two vertices")
    pts = [vertices[0]]
    for raw in vertices[1:]:
        p = snap(scheme, raw, snap_radius) if snap_radius > 0 else raw
        p = orthogonalize(pts[-1], p)
        if p.dist(pts[-1]) > EPS:
            pts.append(p)
    if len(pts) < 2:
        raise DegenerateLine("all segments collapsed")
    with _atomic(scheme):
        ids = [scheme.add_pipe(a, b) for a, b in zip(pts, pts[1:])]
        for p1, p2 in zip(ids, ids[1:]):
            cid = scheme.new_id()
            scheme.connections[cid] = Connection(
                id=cid, e1=PipeEndRef(p1, "b"), e2=PipeEndRef(p2, "a"))
        return ids


def insert_elbow(scheme: Scheme, pipe_id: int, t_start: float, t_end: float,
                 direction: AxisDir, shift: float) -> list[int]:
    """Cut a U-shaped axis-aligned detour into a pipe.

    The pipe becomes five pipes start-a, a-a', a'-b', b'-b, b-end with
    a' = a + shift*dir and b' = b + shift*dir; both original endpoints are
    preserved and four connections appear."""
    pipe = scheme.pipe(pipe_id)
    length = pipe.length()
    if not (0.0 < t_start < t_end < 1.0):
        raise BadInterval(f"need 0 < {t_start:g} < {t_end:g} < 1")
    if min(t_start, t_end - t_start, 1.0 - t_end) * length <= EPS:
        raise BadInterval("an elbow segment would collapse")
    if shift <= 0:
        raise BadInterval("shift must be positive")
    if direction.vector.cross(pipe.direction()).norm() <= COLLINEAR_TOL:
        raise DirParallelToPipe(f"{direction.value} runs along the pipe")

    pa = pipe.point_at(t_start)
    pb = pipe.point_at(t_end)
    off = direction.vector.scaled(shift)
    pa2, pb2 = pa + off, pb + off
    with _atomic(scheme):
        ids = [
            scheme.add_pipe(pipe.a, pa),
            scheme.add_pipe(pa, pa2),
            scheme.add_pipe(pa2, pb2),
            scheme.add_pipe(pb2, pb),
            scheme.add_pipe(pb, pipe.b),
        ]
        for k in range(4):
            cid = scheme.new_id()
            scheme.connections[cid] = Connection(
                id=cid, e1=PipeEndRef(ids[k], "b"), e2=PipeEndRef(ids[k + 1], "a"))

        def locate(t: float) -> tuple[int, float, bool]:
            if t <= t_start:
                return (ids[0], t / t_start, False)
            if t < t_end:
                return (ids[2], (t - t_start) / (t_end - t_start), False)
            return (ids[4], (t - t_end) / (1.0 - t_end), False)

        _rehome_pipe_refs(
            scheme, pipe, locate,
            end_map={"a": PipeEndRef(ids[0], "a"), "b": PipeEndRef(ids[4], "b")})
        del scheme.pipes[pipe_id]
        _drop_degenerate_dimensions(scheme)
        return ids


# ---------------------------------------------------------------------------
# single-point geometry edits


def extend_pipe(scheme: Scheme, end: PipeEndRef, new_point: Point3) -> int:
    """Move a free pipe end along the pipe axis; attached objects keep their
    distance from the fixed end, mirroring if the end crossed it and sliding
    to the nearest end if they no longer fit."""
    pipe = scheme.pipe(end.pipe)
    if scheme.connections_at_end(end):
        raise EndConnected(f"end {end.pipe}.{end.end} is connected")
    fixed = pipe.b if end.end == "a" else pipe.a
    axis_dist = segment_point_dist_3d(
        new_point, fixed - pipe.direction().scaled(1e9),
        fixed + pipe.direction().scaled(1e9))
    if axis_dist > EPS:
        raise OffAxis(f"{axis_dist:g} mm off the pipe axis")
    if new_point.dist(fixed) <= EPS:
        raise ZeroLengthPipe("extension collapses the pipe")
    with _atomic(scheme):
        old_a, old_b = pipe.a, pipe.b
        if end.end == "a":
            pipe.a = new_point
        else:
            pipe.b = new_point
        _relocate_after_end_move(scheme, pipe, end.end, old_a, old_b)
        _drop_degenerate_dimensions(scheme)
        return pipe.id


def move_point(scheme: Scheme, end: PipeEndRef, new_point: Point3,
               scope: str = "all") -> list[int]:
    """Move a pipe end point. With scope "all" every pipe end coincident with
    the old point moves together (mandatory when the end is connected)."""
    if scope not in ("all", "only"):
        raise BadParameter(f"scope must be all or only, not {scope!r}")
    pipe = scheme.pipe(end.pipe)
    if scope == "only" and scheme.connections_at_end(end):
        raise ScopeForbidden("a connected point always moves for all pipes")
    old_point = end.point(scheme)
    if scope == "all":
        targets = scheme.ends_at_point(old_point)
    else:
        targets = [end]
    for ref in targets:
        p = scheme.pipe(ref.pipe)
        fixed = p.b if ref.end == "a" else p.a
        if new_point.dist(fixed) <= EPS:
            raise ZeroLengthPipe(f"pipe {ref.pipe} would collapse")
    with _atomic(scheme):
        for ref in targets:
            p = scheme.pipe(ref.pipe)
            old_a, old_b = p.a, p.b
            if ref.end == "a":
                p.a = new_point
            else:
                p.b = new_point
            _relocate_after_end_move(scheme, p, ref.end, old_a, old_b)
        _drop_degenerate_dimensions(scheme)
        return sorted({r.pipe for r in targets})


def connect_ends(scheme: Scheme, e1: PipeEndRef, e2: PipeEndRef) -> int:
    """Store a connection over two coincident ends of distinct pipes."""
    p1, p2 = scheme.pipe(e1.pipe), scheme.pipe(e2.pipe)
    if e1.pipe == e2.pipe:
        raise SamePipe("a pipe cannot connect to itself")
    gap = e1.point(scheme).dist(e2.point(scheme))
    if gap > EPS:
        raise NotCoincident(f"ends are {gap:g} mm apart")
    key = tuple(sorted((e1.key(), e2.key())))
    for c in scheme.connections.values():
        if tuple(sorted((c.e1.key(), c.e2.key()))) == key:
            raise AlreadyConnected(f"connection {c.id} already joins this pair")
    cid = scheme.new_id()
    scheme.connections[cid] = Connection(id=cid, e1=e1, e2=e2)
    return cid


def disconnect_ends(scheme: Scheme, connection_id: int) -> None:
    """Remove a connection; the pipes stay untouched."""
    scheme.connection(connection_id)
    del scheme.connections[connection_id]


# ---------------------------------------------------------------------------
# cut / merge


def cut_pipe(scheme: Scheme, pipe_id: int, t: float) -> tuple[int, int]:
    """Split a pipe at an interior parameter into two connected halves; any
    other pipe end sitting on the cut point is connected to both halves, so
    the halves join that point's branches."""
    pipe = scheme.pipe(pipe_id)
    length = pipe.length()
    if not (0.0 < t < 1.0) or min(t, 1.0 - t) * length <= EPS:
        raise BadParameter(f"cut parameter {t:g} leaves no usable halves")
    cut_pt = pipe.point_at(t)
    for block in scheme.blocks_on_pipe(pipe_id):
        iv = block.cut_intervals.get(pipe_id)
        if iv and iv[0] + 1e-9 < t < iv[1] - 1e-9:
            raise PointOccupied(
                f"block {block.id} covers the cut point on pipe {pipe_id}")
    for dim in scheme.dimensions.values():
        for o in dim.origins:
            if isinstance(o, BlockAttachRef):
                block = scheme.blocks.get(o.block)
                if block and pipe_id in block.attachments \
                        and o.point(scheme).is_close(cut_pt):
                    raise PointOccupied(
                        f"dimension {dim.id} starts an extension line at the cut point")
    touching = [r for r in scheme.ends_at_point(cut_pt) if r.pipe != pipe_id]
    with _atomic(scheme):
        h1 = scheme.add_pipe(pipe.a, cut_pt)
        h2 = scheme.add_pipe(cut_pt, pipe.b)
        cid = scheme.new_id()
        scheme.connections[cid] = Connection(
            id=cid, e1=PipeEndRef(h1, "b"), e2=PipeEndRef(h2, "a"))
        for ref in touching:
            for half_end in (PipeEndRef(h1, "b"), PipeEndRef(h2, "a")):
                nid = scheme.new_id()
                scheme.connections[nid] = Connection(id=nid, e1=ref, e2=half_end)

        def locate(s: float) -> tuple[int, float, bool]:
            if s < t:
                return (h1, s / t, False)
            return (h2, (s - t) / (1.0 - t), False)

        _rehome_pipe_refs(
            scheme, pipe, locate,
            end_map={"a": PipeEndRef(h1, "a"), "b": PipeEndRef(h2, "b")})
        del scheme.pipes[pipe_id]
        _drop_degenerate_dimensions(scheme)
        return (h1, h2)


def _continuations(scheme: Scheme, pipe: Pipe, end: str) -> list[Connection]:
    """Connections at an end leading to a collinear continuation."""
    ref = PipeEndRef(pipe.id, end)
    outward = pipe.direction() if end == "b" else -pipe.direction()
    found = []
    for conn in scheme.connections_at_end(ref):
        other = conn.other_end(pipe.id)
        q = scheme.pipe(other.pipe)
        q_out = (q.b - q.a).unit() if other.end == "a" else (q.a - q.b).unit()
        if q_out.cross(outward).norm() <= COLLINEAR_TOL and q_out.dot(outward) > 0:
            found.append(conn)
    found.sort(key=lambda c: c.other_end(pipe.id).pipe)
    return found


def merge_pipes(scheme: Scheme, pipe_id: int, side: str | None = None) -> int:
    """Fuse a pipe with its collinear connected continuation into one pipe.

    The splice point may not carry a dimension extension origin nor the
    attachment of a multi-pipe block; other pipes connected at the splice
    point leave the merged branch."""
    pipe = scheme.pipe(pipe_id)
    if side is None:
        sides = [s for s in ("a", "b") if _continuations(scheme, pipe, s)]
        if len(sides) > 1:
            raise BadParameter("continuations on both sides; specify one")
        if not sides:
            raise NoContinuation(f"pipe {pipe_id} has no collinear continuation")
        side = sides[0]
    if side not in ("a", "b"):
        raise BadParameter(f"side must be a or b, not {side!r}")
    conts = _continuations(scheme, pipe, side)
    if not conts:
        raise NoContinuation(f"no collinear continuation at end {side}")
    conn = conts[0]
    other = conn.other_end(pipe_id)
    q = scheme.pipe(other.pipe)
    junction = pipe.end_point(side)

    for dim in scheme.dimensions.values():
        for o in dim.origins:
            if o.point(scheme).is_close(junction):
                raise JunctionLocked(
                    f"dimension {dim.id} starts an extension line at the splice point")
    for block in scheme.blocks.values():
        if len(block.attachments) >= 2:
            for slot in range(len(block.attachments)):
                if block.attachment_point(scheme, slot).is_close(junction) \
                        or block.position.is_close(junction):
                    raise JunctionLocked(
                        f"block {block.id} is attached at the splice point")

    q_far = q.b if other.end == "a" else q.a
    with _atomic(scheme):
        if side == "b":
            merged = scheme.add_pipe(pipe.a, q_far)
        else:
            merged = scheme.add_pipe(q_far, pipe.b)
        m = scheme.pipe(merged)
        dropped = [c.id for c in scheme.connections.values()
                   if c.e1.point(scheme).is_close(junction)
                   and c.e2.point(scheme).is_close(junction)]
        for cid in dropped:
            if cid != conn.id:
                log.warning("merge_pipes: connection %d left the branch", cid)
            del scheme.connections[cid]

        def locate_factory(src: Pipe):
            flipped = src.direction().dot(m.direction()) < 0

            def locate(t: float) -> tuple[int, float, bool]:
                pt = src.point_at(t)
                tm = segment_param_of_point(pt, m.a, m.b)
                return (merged, tm, flipped)
            return locate

        _rehome_pipe_refs(
            scheme, pipe, locate_factory(pipe),
            end_map={"a": PipeEndRef(merged, "a"),
                     "b": PipeEndRef(merged, "b")})
        _rehome_pipe_refs(
            scheme, q, locate_factory(q),
            end_map={"a": PipeEndRef(merged, "a" if q.a.dist(m.a) < q.a.dist(m.b) else "b"),
                     "b": PipeEndRef(merged, "a" if q.b.dist(m.a) < q.b.dist(m.b) else "b")})
        del scheme.pipes[pipe_id]
        del scheme.pipes[q.id]
        _drop_degenerate_dimensions(scheme)
        return merged


# ---------------------------------------------------------------------------
# deletes


def delete_pipe(scheme: Scheme, pipe_id: int) -> set[int]:
    """Delete a pipe and cascade: its connections, every block attached to it
    (even ones also attached elsewhere), its leaders and height marks, then
    texts/designators left with no leaders and dimensions left without a
    measurable chain."""
    scheme.pipe(pipe_id)
    seed = {pipe_id} | {b.id for b in scheme.blocks_on_pipe(pipe_id)}
    doomed = reference_closure(scheme, seed)
    with _atomic(scheme):
        apply_deletion(scheme, doomed)
    return doomed


def plan_delete_part(scheme: Scheme, seed: set[int]) -> set[int]:
    """Preview of delete_part: the reference closure of the seed set (blocks
    survive by pruning attachments here)."""
    return reference_closure(scheme, set(seed))


def delete_part(scheme: Scheme, seed: set[int]) -> set[int]:
    """Apply the closure deletion previewed by plan_delete_part."""
    doomed = reference_closure(scheme, set(seed))
    with _atomic(scheme):
        apply_deletion(scheme, doomed)
    return doomed


# ---------------------------------------------------------------------------
# part / branch moves


def branch_of(scheme: Scheme, pipe_id: int) -> set[int]:
    """Connected component of the pipe graph containing the pipe."""
    scheme.pipe(pipe_id)
    adj: dict[int, set[int]] = {}
    for conn in scheme.connections.values():
        a, b = conn.pipes()
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen = {pipe_id}
    work = [pipe_id]
    while work:
        for nb in adj.get(work.pop(), ()):
            if nb not in seen:
                seen.add(nb)
                work.append(nb)
    return seen


def move_part(scheme: Scheme, pipe_ids: set[int], shift: Point3) -> list[str]:
    """Rigidly translate a set of pipes plus everything positioned purely by
    them. Connections to unmoved pipes that stop being coincident are removed
    with a warning; blocks shared with unmoved pipes lose the moved
    attachments."""
    for pid in pipe_ids:
        scheme.pipe(pid)
    moved = set(pipe_ids)
    warnings: list[str] = []
    if shift.norm() == 0.0:
        return warnings
    with _atomic(scheme):
        for pid in moved:
            p = scheme.pipes[pid]
            p.a, p.b = p.a + shift, p.b + shift
        for block in list(scheme.blocks.values()):
            inside = [p for p in block.attachments if p in moved]
            if not inside:
                continue
            if len(inside) == len(block.attachments):
                block.position = block.position + shift
            else:
                w = f"block {block.id}: detached from moved pipes {sorted(inside)}"
                warnings.append(w)
                log.warning("move_part: %s", w)
                _prune_block_slots(scheme, block, set(inside))
        for conn in list(scheme.connections.values()):
            if conn.e1.point(scheme).dist(conn.e2.point(scheme)) > EPS:
                w = f"connection {conn.id}: coincidence broken, removed"
                warnings.append(w)
                log.warning("move_part: %s", w)
                del scheme.connections[conn.id]
        shift2 = project(shift, scheme.settings.projection)
        for obj in list(scheme.texts.values()) + list(scheme.designators.values()):
            if all(_leader_element_moved(scheme, l, moved) for l in obj.leaders):
                for l in obj.leaders:
                    l.anchor = v2_add(l.anchor, shift2)
        for mark in scheme.height_marks.values():
            if mark.pipe in moved:
                mark.level += shift.z / 1000.0
        _drop_degenerate_dimensions(scheme, warnings)
    return warnings


def _leader_element_moved(scheme: Scheme, leader: Leader, moved: set[int]) -> bool:
    if leader.targets_pipe():
        return leader.pipe in moved
    block = scheme.blocks.get(leader.block)
    return block is not None and bool(block.attachments) \
        and all(p in moved for p in block.attachments)


def move_branch(scheme: Scheme, seed_pipe: int, shift: Point3) -> set[int]:
    """Translate the whole branch of a pipe; orientation and on-pipe object
    positions are preserved."""
    pipe = scheme.pipe(seed_pipe)
    if not scheme.connections_of_pipe(seed_pipe):
        raise NoConnections(f"pipe {seed_pipe} has no connections")
    branch = branch_of(scheme, seed_pipe)
    move_part(scheme, branch, shift)
    return branch


# ---------------------------------------------------------------------------
# replication


def replicate(scheme: Scheme, selection: set[int], shift: Point3,
              count: int) -> list[dict[int, int]]:
    """Create count shifted copies of a closed selection with fresh ids.

    A selection of exactly one (axial, undesignated) block replicates along
    its host pipe; anything else must be reference-closed and self-contained.
    Returns one old-id to new-id map per copy."""
    if count < 1:
        raise BadParameter("count must be at least 1")
    selection = set(selection)
    for oid in selection:
        if not scheme.alive(oid):
            raise UnknownId(f"selection id {oid} is not live")
    closure = reference_closure(scheme, selection)
    if closure != selection:
        raise NotClosed(
            f"selection drags in {sorted(closure - selection)}")

    if len(selection) == 1 and next(iter(selection)) in scheme.blocks:
        return _replicate_single_block(scheme, next(iter(selection)), shift, count)

    outside = _external_refs(scheme, selection)
    if outside:
        raise NotClosed(f"selection references outside objects {sorted(outside)}")
    with _atomic(scheme):
        return [_copy_selection(scheme, selection, shift.scaled(float(k)))
                for k in range(1, count + 1)]


def _replicate_single_block(scheme: Scheme, block_id: int, shift: Point3,
                            count: int) -> list[dict[int, int]]:
    block = scheme.block(block_id)
    if block.attach_kind != "axial" or not block.attachments:
        raise NotClosed("only axial blocks replicate alone")
    host = scheme.pipe(block.attachments[0])
    axis = host.direction()
    if shift.cross(axis).norm() > COLLINEAR_TOL * max(shift.norm(), 1.0):
        raise OffPipe("shift must run along the host pipe axis")
    length = host.length()
    cut = block.cut_lengths[0]
    half = cut / 2.0
    taken = [iv for b in scheme.blocks_on_pipe(host.id)
             for p, iv in b.cut_intervals.items() if p == host.id]
    with _atomic(scheme):
        out = []
        for k in range(1, count + 1):
            pos = block.position + shift.scaled(float(k))
            s = (pos - host.a).dot(axis)
            if s - half < -1e-9 or s + half > length + 1e-9:
                raise DoesNotFit(f"copy {k} at {s:g} mm falls off the pipe")
            iv = ((s - half) / length, (s + half) / length)
            for o0, o1 in taken:
                if iv[0] < o1 - 1e-9 and o0 < iv[1] - 1e-9:
                    raise DoesNotFit(f"copy {k} overlaps an existing block")
            taken.append(iv)
            bid = scheme.new_id()
            clone = copy.deepcopy(block)
            clone.id = bid
            clone.position = pos
            clone.cut_intervals = {host.id: iv}
            clone.designator = None
            scheme.blocks[bid] = clone
            out.append({block_id: bid})
        return out


def _external_refs(scheme: Scheme, selection: set[int]) -> set[int]:
    out: set[int] = set()

    def note(oid: int | None):
        if oid is not None and oid not in selection:
            out.add(oid)

    for oid in selection:
        kind = scheme.kind_of(oid)
        if kind == "connection":
            c = scheme.connections[oid]
            note(c.e1.pipe), note(c.e2.pipe)
        elif kind == "pipe":
            note(scheme.pipes[oid].designator)
        elif kind == "block":
            b = scheme.blocks[oid]
            for p in b.attachments:
                note(p)
            note(b.designator)
        elif kind == "dimension":
            for o in scheme.dimensions[oid].origins:
                note(o.pipe if isinstance(o, PipeEndRef) else o.block)
        elif kind in ("text", "designator"):
            obj = scheme.texts.get(oid) or scheme.designators.get(oid)
            for l in obj.leaders:
                note(l.target_id())
            if kind == "designator":
                note(obj.target_id())
        elif kind == "height_mark":
            note(scheme.height_marks[oid].pipe)
        elif kind == "offset":
            off = scheme.offsets[oid]
            note(off.anchor_pipe), note(off.scope_pipe)
            for p, _ in off.broken:
                note(p)
        elif kind == "grid":
            out.add(oid)       # grids are not replicable
    return out


_COPY_ORDER = ("pipe", "block", "connection", "height_mark", "dimension",
               "text", "designator", "offset")


def _copy_selection(scheme: Scheme, selection: set[int],
                    shift: Point3) -> dict[int, int]:
    idmap: dict[int, int] = {}
    shift2 = project(shift, scheme.settings.projection)
    by_kind: dict[str, list[int]] = {}
    for oid in sorted(selection):
        by_kind.setdefault(scheme.kind_of(oid), []).append(oid)
    for kind in _COPY_ORDER:
        for oid in by_kind.get(kind, []):
            clone = copy.deepcopy(scheme.store(kind)[oid])
            nid = scheme.new_id()
            clone.id = nid
            idmap[oid] = nid
            if kind == "pipe":
                clone.a, clone.b = clone.a + shift, clone.b + shift
            elif kind == "block":
                clone.position = clone.position + shift
                clone.attachments = [idmap[p] for p in clone.attachments]
                clone.cut_lengths = list(clone.cut_lengths)
                clone.cut_intervals = {idmap[p]: iv
                                       for p, iv in clone.cut_intervals.items()}
            elif kind == "connection":
                clone.e1 = PipeEndRef(idmap[clone.e1.pipe], clone.e1.end)
                clone.e2 = PipeEndRef(idmap[clone.e2.pipe], clone.e2.end)
            elif kind == "height_mark":
                clone.pipe = idmap[clone.pipe]
                clone.level += shift.z / 1000.0
            elif kind == "dimension":
                clone.origins = [
                    PipeEndRef(idmap[o.pipe], o.end) if isinstance(o, PipeEndRef)
                    else BlockAttachRef(idmap[o.block], o.slot)
                    for o in clone.origins]
            elif kind in ("text", "designator"):
                for l in clone.leaders:
                    if l.targets_pipe():
                        l.pipe = idmap[l.pipe]
                    else:
                        l.block = idmap[l.block]
                    l.anchor = v2_add(l.anchor, shift2)
                if kind == "designator":
                    if clone.target_pipe is not None:
                        clone.target_pipe = idmap[clone.target_pipe]
                    else:
                        clone.target_block = idmap[clone.target_block]
            elif kind == "offset":
                clone.anchor_pipe = idmap[clone.anchor_pipe]
                if clone.scope_pipe is not None:
                    clone.scope_pipe = idmap[clone.scope_pipe]
                clone.broken = [(idmap[p], t) for p, t in clone.broken]
            scheme.store(kind)[nid] = clone
    # designator backlinks map through the copy (designators clone after
    # their targets, so remap from the source objects)
    for oid in by_kind.get("pipe", ()):
        src = scheme.pipes[oid]
        if src.designator is not None:
            scheme.pipes[idmap[oid]].designator = idmap[src.designator]
    for oid in by_kind.get("block", ()):
        src = scheme.blocks[oid]
        if src.designator is not None:
            scheme.blocks[idmap[oid]].designator = idmap[src.designator]
    return idmap


# ---------------------------------------------------------------------------
# offsets, level, sheet placement


def set_offset(scheme: Scheme, kind: str, anchor_pipe: int, anchor_t: float,
               sign: int, shift: Vec2,
               broken: list[tuple[int, float]] | None = None,
               scope_pipe: int | None = None) -> int:
    """Store a render-time displacement region. Model coordinates never
    change; rendering moves the projected images."""
    if kind not in ("global", "local"):
        raise BadParameter(f"offset kind {kind!r}")
    if sign not in (1, -1):
        raise BadParameter("sign must be +1 or -1")
    if shift == (0.0, 0.0):
        raise BadParameter("offset shift must be nonzero")
    if not (0.0 <= anchor_t <= 1.0):
        raise BadParameter(f"anchor t={anchor_t:g} outside [0,1]")
    anchor = scheme.pipe(anchor_pipe)
    broken = list(broken or [])
    if kind == "local":
        if scope_pipe is None:
            raise BadParameter("local offset needs a scope pipe")
        scheme.pipe(scope_pipe)
        plane_pt = anchor.point_at(anchor_t)
        normal = anchor.direction()
        for pid, t in broken:
            p = scheme.pipe(pid)
            if not (0.0 < t < 1.0):
                raise BadParameter(f"break t={t:g} on pipe {pid}")
            da = (p.a - plane_pt).dot(normal)
            db = (p.b - plane_pt).dot(normal)
            if da * db > 0 and min(abs(da), abs(db)) > EPS:
                raise NotCrossing(f"pipe {pid} does not cross the offset plane")
    elif broken:
        raise BadParameter("global offsets declare no broken pipes")
    oid = scheme.new_id()
    scheme.offsets[oid] = OffsetSpec(
        id=oid, kind=kind, anchor_pipe=anchor_pipe, anchor_t=anchor_t,
        sign=sign, shift=tuple(shift), broken=broken, scope_pipe=scope_pipe)
    return oid


def set_level(scheme: Scheme, mark_id: int, new_level: float) -> float:
    """Re-declare one height mark's level: every model z shifts by the
    difference and every mark's displayed value follows."""
    try:
        mark = scheme.height_marks[mark_id]
    except KeyError:
        raise UnknownId(f"no height mark with id {mark_id}") from None
    delta_m = new_level - mark.level
    if delta_m == 0.0:
        return 0.0
    dz = delta_m * 1000.0
    lift = Point3(0.0, 0.0, dz)
    for pipe in scheme.pipes.values():
        pipe.a, pipe.b = pipe.a + lift, pipe.b + lift
    for block in scheme.blocks.values():
        block.position = block.position + lift
    for m in scheme.height_marks.values():
        m.level += delta_m
    return delta_m


def move_scheme(scheme: Scheme, paper_shift: Vec2) -> Vec2:
    """Shift the whole drawing on the sheet; model coordinates unchanged."""
    scheme.settings.placement = v2_add(scheme.settings.placement,
                                       tuple(paper_shift))
    return scheme.settings.placement


# ---------------------------------------------------------------------------
# shared relocation machinery


def _rehome_pipe_refs(scheme: Scheme, old_pipe: Pipe, locate,
                      end_map: dict[str, PipeEndRef]) -> None:
    """Re-point every reference to old_pipe onto its replacement pipes.

    ``locate(t) -> (pipe_id, t, flipped)`` maps an old parameter; end_map
    maps the old "a"/"b" end refs. Connections at replaced ends follow
    end_map; the caller removes connections that must die before calling.
    """
    old_id = old_pipe.id
    for conn in scheme.connections.values():
        for attr in ("e1", "e2"):
            ref = getattr(conn, attr)
            if ref.pipe == old_id:
                setattr(conn, attr, end_map[ref.end])
        if conn.e2.key() < conn.e1.key():
            conn.e1, conn.e2 = conn.e2, conn.e1
    for dim in scheme.dimensions.values():
        dim.origins = [end_map[o.end] if isinstance(o, PipeEndRef) and o.pipe == old_id
                       else o for o in dim.origins]
    for mark in scheme.height_marks.values():
        if mark.pipe == old_id:
            old_z = old_pipe.point_at(mark.t).z
            mark.pipe, mark.t, _ = locate(mark.t)
            mark.level += (scheme.pipe(mark.pipe).point_at(mark.t).z - old_z) / 1000.0
    for obj in list(scheme.texts.values()) + list(scheme.designators.values()):
        for l in obj.leaders:
            if l.pipe == old_id:
                l.pipe, l.t, _ = locate(l.t)
    for desig in scheme.designators.values():
        if desig.target_pipe == old_id:
            main = desig.leaders[desig.main_leader]
            new_host = main.pipe if main.targets_pipe() else locate(0.5)[0]
            desig.target_pipe = new_host
            scheme.pipes[new_host].designator = desig.id
    for off in scheme.offsets.values():
        if off.anchor_pipe == old_id:
            off.anchor_pipe, off.anchor_t, flipped = locate(off.anchor_t)
            if flipped:
                off.sign = -off.sign
        if off.scope_pipe == old_id:
            off.scope_pipe = locate(0.5)[0]
        off.broken = [locate(t)[:2] if p == old_id else (p, t)
                      for p, t in off.broken]
    for block in list(scheme.blocks.values()):
        if old_id not in block.attachments:
            continue
        slot = block.attachments.index(old_id)
        _rehome_block_slot(scheme, block, slot, old_pipe, locate)


def _rehome_block_slot(scheme: Scheme, block: BlockInstance, slot: int,
                       old_pipe: Pipe, locate) -> None:
    old_id = old_pipe.id
    reach = block.cut_lengths[slot]
    if block.attach_kind == "axial":
        t_old = segment_param_of_point(block.position, old_pipe.a, old_pipe.b)
        new_id, t_new, _ = locate(t_old)
        host = scheme.pipe(new_id)
        block.position = host.point_at(t_new)
        iv = cut_interval_for_axial(host, t_new, reach)
        _check_free_for(scheme, block, new_id, iv)
        block.attachments[slot] = new_id
        del block.cut_intervals[old_id]
        block.cut_intervals[new_id] = iv
        _refresh_axial_frame(block, host)
    else:
        t_old = segment_param_of_point(block.position, old_pipe.a, old_pipe.b)
        new_id, _, _ = locate(t_old)
        host = scheme.pipe(new_id)
        iv = cut_interval_from_junction(host, block.position, reach)
        _check_free_for(scheme, block, new_id, iv)
        block.attachments[slot] = new_id
        del block.cut_intervals[old_id]
        block.cut_intervals[new_id] = iv


def _check_free_for(scheme: Scheme, block: BlockInstance, pipe_id: int,
                    interval: tuple[float, float]) -> None:
    t0, t1 = interval
    for other in scheme.blocks_on_pipe(pipe_id):
        if other.id == block.id:
            continue
        o0, o1 = other.cut_intervals.get(pipe_id, (None, None))
        if o0 is not None and t0 < o1 - 1e-9 and o0 < t1 - 1e-9:
            raise CutCollision(
                f"block {block.id} collides with block {other.id} on pipe {pipe_id}")


def _refresh_axial_frame(block: BlockInstance, host: Pipe) -> None:
    u = host.direction()
    if u.cross(block.u).norm() <= 1e-12 and u.dot(block.u) > 0:
        return
    n = block.n - u.scaled(u.dot(block.n))
    if n.norm() <= 1e-9:
        # normal collapsed onto the new axis; take the least-aligned global axis
        from .geometry import GLOBAL_AXES
        cand = min(GLOBAL_AXES, key=lambda e: abs(u.dot(e)))
        n = cand - u.scaled(u.dot(cand))
    block.u = u
    block.n = n.unit()
    block.v = block.n.cross(block.u)


def _relocate_after_end_move(scheme: Scheme, pipe: Pipe, moved_end: str,
                             old_a: Point3, old_b: Point3) -> None:
    """Relocate blocks/marks/leaders on a pipe after one end moved: objects
    keep their distance from the fixed end, mirror through it if the end
    crossed over, and slide (stacking) to the nearest end if they stop
    fitting."""
    fixed_pt = pipe.a if moved_end == "b" else pipe.b
    old_from_a = (old_a, old_b)
    new_dir_from_fixed = ((pipe.b if moved_end == "b" else pipe.a) - fixed_pt).unit()
    new_len = pipe.length()

    def old_point(t: float) -> Point3:
        return old_from_a[0].lerp(old_from_a[1], t)

    def new_t_for_distance(s: float) -> float:
        s = max(0.0, min(s, new_len))
        return s / new_len if moved_end == "b" else 1.0 - s / new_len

    def s_for_param(t: float) -> float:
        return t * new_len if moved_end == "b" else (1.0 - t) * new_len

    # junction-pinned blocks first: they reserve space at the pipe ends
    reserved: list[tuple[float, float]] = []
    for block in scheme.blocks_on_pipe(pipe.id):
        if block.attach_kind == "axial":
            continue
        if block.position.is_close(pipe.end_point(moved_end)) or \
                block.position.is_close(old_point(1.0 if moved_end == "b" else 0.0)):
            block.position = pipe.end_point(moved_end)
        reach = block.cut_lengths[block.attachments.index(pipe.id)]
        iv = cut_interval_from_junction(pipe, block.position, reach)
        block.cut_intervals[pipe.id] = iv
        reserved.append(tuple(sorted((s_for_param(iv[0]), s_for_param(iv[1])))))

    # axial blocks keep their distance from the fixed end, then slide and
    # stack toward the near end until everything fits
    axial = [b for b in scheme.blocks_on_pipe(pipe.id) if b.attach_kind == "axial"]
    placed = list(reserved)
    for block in sorted(axial, key=lambda b: -(b.position - fixed_pt).norm()):
        s = (block.position - fixed_pt).norm()
        half = block.cut_lengths[block.attachments.index(pipe.id)] / 2.0
        if s + half > new_len:
            s = new_len - half
        s = max(half, s)
        lo, hi = s - half, s + half
        pushed = True
        while pushed:
            pushed = False
            for p0, p1 in placed:
                if lo < p1 - 1e-9 and p0 < hi - 1e-9:
                    hi = p0
                    lo = hi - 2 * half
                    pushed = True
        if lo < -1e-9:
            raise CutCollision(f"block {block.id} no longer fits on pipe {pipe.id}")
        placed.append((lo, hi))
        s = (lo + hi) / 2.0
        block.position = fixed_pt + new_dir_from_fixed.scaled(s)
        block.cut_intervals[pipe.id] = (
            min(new_t_for_distance(lo), new_t_for_distance(hi)),
            max(new_t_for_distance(lo), new_t_for_distance(hi)))
        _refresh_axial_frame(block, pipe)

    def relocate_param(t: float) -> float:
        s = (old_point(t) - fixed_pt).norm()
        return new_t_for_distance(s)

    for mark in scheme.height_marks.values():
        if mark.pipe == pipe.id:
            old_z = old_point(mark.t).z
            mark.t = relocate_param(mark.t)
            mark.level += (pipe.point_at(mark.t).z - old_z) / 1000.0
    for obj in list(scheme.texts.values()) + list(scheme.designators.values()):
        for l in obj.leaders:
            if l.pipe == pipe.id:
                l.t = relocate_param(l.t)
    for off in scheme.offsets.values():
        if off.anchor_pipe == pipe.id:
            off.anchor_t = relocate_param(off.anchor_t)
        off.broken = [(p, relocate_param(t) if p == pipe.id else t)
                      for p, t in off.broken]
        if off.anchor_pipe == pipe.id:
            off.anchor_t = min(max(off.anchor_t, 0.0), 1.0)


def _prune_block_slots(scheme: Scheme, block: BlockInstance,
                       dead_pipes: set[int]) -> None:
    """Drop attachments to the given pipes, remapping dimension origins that
    address the surviving slots."""
    slot_map: dict[int, int] = {}
    new_attach: list[int] = []
    new_lengths: list[float] = []
    for i, p in enumerate(block.attachments):
        if p in dead_pipes:
            continue
        slot_map[i] = len(new_attach)
        new_attach.append(p)
        new_lengths.append(block.cut_lengths[i])
    block.attachments = new_attach
    block.cut_lengths = new_lengths
    block.cut_intervals = {p: iv for p, iv in block.cut_intervals.items()
                           if p not in dead_pipes}
    for dim in scheme.dimensions.values():
        kept = []
        for o in dim.origins:
            if isinstance(o, BlockAttachRef) and o.block == block.id:
                if o.slot in slot_map:
                    kept.append(BlockAttachRef(block.id, slot_map[o.slot]))
            else:
                kept.append(o)
        dim.origins = kept


def _drop_degenerate_dimensions(scheme: Scheme,
                                warnings: list[str] | None = None) -> None:
    from .model import drop_degenerate_dimensions
    dropped = drop_degenerate_dimensions(scheme, warnings)
    for did in dropped:
        log.warning("dimension %d: degenerated, removed", did)


# ---------------------------------------------------------------------------
# applicability (object-first interaction)


def applicable_ops(scheme: Scheme, kind: str, oid: int) -> list[str]:
    """Editing verbs applicable to one picked object, for menu greying."""
    out: list[str] = []
    if kind == "pipe":
        pipe = scheme.pipe(oid)
        out += ["cut_pipe", "delete_pipe", "insert_elbow", "move_point",
                "move_part", "replicate", "set_offset"]
        free_ends = [e for e in ("a", "b")
                     if not scheme.connections_at_end(PipeEndRef(oid, e))]
        if free_ends:
            out.append("extend_pipe")
            for e in free_ends:
                pt = scheme.pipe(oid).end_point(e)
                others = [r for r in scheme.ends_at_point(pt) if r.pipe != oid]
                if others:
                    out.append("connect_ends")
                    break
        if scheme.connections_of_pipe(oid):
            out.append("move_branch")
        for side in ("a", "b"):
            if _continuations(scheme, pipe, side):
                out.append("merge_pipes")
                break
        if pipe.designator is not None:
            out.append("edit_spec_properties")
        else:
            out.append("place_designator")
        out += ["place_height_mark", "add_leader_text"]
    elif kind == "block":
        block = scheme.block(oid)
        out += ["replace_block", "delete_part", "replicate"]
        if len(block.attachments) < block.arity:
            out.append("attach_pipe")
        if block.designator is not None:
            out.append("edit_spec_properties")
        else:
            out.append("place_designator")
        out.append("add_leader_text")
    elif kind == "connection":
        out.append("disconnect_ends")
    elif kind == "dimension":
        out.append("delete_part")
    elif kind == "text":
        obj = scheme.texts.get(oid)
        out += ["change_leader_target", "delete_part"]
        if obj is not None and len(obj.leaders) > 1:
            out.append("change_main_leader")
    elif kind == "designator":
        obj = scheme.designators.get(oid)
        out += ["change_leader_target", "edit_spec_properties", "delete_part"]
        if obj is not None and len(obj.leaders) > 1:
            out.append("change_main_leader")
        if obj is not None and len(obj.positions) in (4, 5):
            out.append("flange_kit")
    elif kind == "height_mark":
        out += ["set_level", "delete_part"]
    elif kind == "offset":
        out.append("delete_part")
    return sorted(set(out))
