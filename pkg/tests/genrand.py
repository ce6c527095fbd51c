"""Random scheme builder and random operation driver used by the closure,
inverse-pair, persistence and integrity-fuzz acceptance checks. Everything
goes through the public kernel API; expected kernel errors are swallowed."""

from __future__ import annotations

import random

from axonpipe import annotate, editops
from axonpipe.errors import KernelError
from axonpipe.geometry import AxisDir, Point3
from axonpipe.model import (
    BlockAttachRef,
    Leader,
    PipeEndRef,
    Scheme,
)
from axonpipe.symbols import Library, place_block

from conftest import elbow_symbol, gate_valve_symbol, tee_symbol

AXES = list(AxisDir)


def fixture_library() -> Library:
    lib = Library(name="fixtures")
    for sym in (gate_valve_symbol(8.0), gate_valve_symbol(100.0),
                elbow_symbol(), tee_symbol()):
        lib.symbols[sym.name] = sym
    return lib


def _grid(rng: random.Random) -> float:
    return 100.0 * rng.randint(-20, 20)


def _random_free_point(rng, scheme) -> Point3:
    return Point3(_grid(rng), _grid(rng), _grid(rng))


def _existing_end(rng, scheme) -> tuple[PipeEndRef, Point3] | None:
    if not scheme.pipes:
        return None
    pid = rng.choice(sorted(scheme.pipes))
    end = rng.choice(("a", "b"))
    ref = PipeEndRef(pid, end)
    return ref, ref.point(scheme)


def _pipe_exists(scheme, a: Point3, b: Point3) -> bool:
    for p in scheme.pipes.values():
        if (p.a.is_close(a) and p.b.is_close(b)) or \
                (p.a.is_close(b) and p.b.is_close(a)):
            return True
    return False


def add_random_pipe(rng, scheme) -> int | None:
    if scheme.pipes and rng.random() < 0.7:
        picked = _existing_end(rng, scheme)
        start = picked[1]
    else:
        start = _random_free_point(rng, scheme)
    axis = rng.choice(AXES)
    length = 100.0 * rng.randint(3, 12)
    end = start + axis.vector.scaled(length)
    if _pipe_exists(scheme, start, end):
        return None
    return scheme.add_pipe(start, end)


def connect_something(rng, scheme) -> None:
    ends_by_point: dict[tuple, list[PipeEndRef]] = {}
    for pid in scheme.pipes:
        for end in ("a", "b"):
            ref = PipeEndRef(pid, end)
            pt = ref.point(scheme)
            key = (round(pt.x, 3), round(pt.y, 3), round(pt.z, 3))
            ends_by_point.setdefault(key, []).append(ref)
    groups = [refs for refs in ends_by_point.values() if len(refs) >= 2]
    if not groups:
        return
    refs = rng.choice(groups)
    a, b = rng.sample(refs, 2)
    editops.connect_ends(scheme, a, b)


def place_random_valve(rng, scheme, library) -> int:
    if not scheme.pipes:
        raise KernelError("no pipes")
    pid = rng.choice(sorted(scheme.pipes))
    t = rng.choice([0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
    pipe = scheme.pipes[pid]
    return place_block(scheme, library, "gate_valve_100", pipe.point_at(t),
                       snap_radius=3.0, position_t=t)


def add_random_dimension(rng, scheme) -> int:
    origins = []
    ends = [PipeEndRef(p, e) for p in scheme.pipes for e in ("a", "b")]
    attach = [BlockAttachRef(b.id, s)
              for b in scheme.blocks.values()
              for s in range(len(b.attachments))]
    pool = ends + attach
    if len(pool) < 2:
        raise KernelError("nothing to dimension")
    count = min(len(pool), rng.choice([2, 2, 3]))
    origins = rng.sample(pool, count)
    variants = annotate.enumerate_dimension_variants(scheme, origins)
    if not variants:
        raise KernelError("origins share every coordinate")
    axis, side = rng.choice(variants)
    return annotate.add_chain_dimension(scheme, origins, axis, side,
                                        offset=10.0 * rng.randint(1, 3))


def add_random_text(rng, scheme) -> int:
    targets = []
    pool = sorted(scheme.pipes)
    blocks = sorted(scheme.blocks)
    for _ in range(rng.choice([1, 1, 2])):
        if blocks and rng.random() < 0.4:
            targets.append(Leader(anchor=(_grid(rng) / 10, _grid(rng) / 10),
                                  block=rng.choice(blocks)))
        elif pool:
            targets.append(Leader(anchor=(_grid(rng) / 10, _grid(rng) / 10),
                                  pipe=rng.choice(pool),
                                  t=rng.choice([0.25, 0.5, 0.75])))
    if not targets:
        raise KernelError("no leader targets")
    return annotate.add_leader_text(scheme, f"note{rng.randint(1, 99)}", targets)


def add_random_designator(rng, scheme) -> int:
    candidates = [("pipe", p.id) for p in scheme.pipes.values()
                  if p.designator is None]
    candidates += [("block", b.id) for b in scheme.blocks.values()
                   if b.designator is None]
    if not candidates:
        raise KernelError("no undesignated elements")
    kind, oid = rng.choice(candidates)
    return annotate.place_designator(scheme, kind, oid,
                                     rng.choice([1, 1, 2, 4, 5]))


def add_random_mark(rng, scheme) -> int:
    if not scheme.pipes:
        raise KernelError("no pipes")
    pid = rng.choice(sorted(scheme.pipes))
    return annotate.place_height_mark(scheme, pid,
                                      rng.choice([0.0, 0.25, 0.5, 1.0]),
                                      rng.randint(-2, 8) * 0.5)


def add_random_offset(rng, scheme) -> int:
    if not scheme.pipes:
        raise KernelError("no pipes")
    pid = rng.choice(sorted(scheme.pipes))
    kind = rng.choice(["global", "global", "local"])
    shift = (rng.choice([-30.0, -20.0, 20.0, 30.0]), rng.choice([0.0, 15.0]))
    if kind == "global":
        return editops.set_offset(scheme, "global", pid, rng.choice([0.3, 0.5]),
                                  rng.choice([1, -1]), shift)
    scope = rng.choice(sorted(scheme.pipes))
    return editops.set_offset(scheme, "local", pid, 0.5, rng.choice([1, -1]),
                              shift, broken=[], scope_pipe=scope)


def random_scheme(rng: random.Random, library: Library,
                  max_objects: int = 30) -> Scheme:
    """A structurally valid random scheme built through public operations."""
    scheme = Scheme()
    builders = [
        (add_random_pipe, 6),
        (lambda r, s: connect_something(r, s), 5),
        (lambda r, s: place_random_valve(r, s, library), 2),
        (lambda r, s: add_random_dimension(r, s), 2),
        (lambda r, s: add_random_text(r, s), 2),
        (lambda r, s: add_random_designator(r, s), 1),
        (lambda r, s: add_random_mark(r, s), 2),
        (lambda r, s: add_random_offset(r, s), 1),
    ]
    for _ in range(3):
        add_random_pipe(rng, scheme)
    guard = 0
    while sum(len(store) for _, store in scheme.stores()) < max_objects \
            and guard < 200:
        guard += 1
        fn = rng.choices([b for b, _ in builders],
                         weights=[w for _, w in builders])[0]
        try:
            fn(rng, scheme)
        except (KernelError, IndexError, ValueError):
            continue
    return scheme


# ---------------------------------------------------------------------------
# random op driver for the integrity fuzz


def _op_add_pipe(rng, s, lib):
    add_random_pipe(rng, s)

def _op_sketch(rng, s, lib):
    start = _random_free_point(rng, s)
    pts = [start]
    for _ in range(rng.randint(1, 3)):
        pts.append(pts[-1] + Point3(_grid(rng) / 2, _grid(rng) / 2, _grid(rng) / 2))
    editops.sketch_line(s, pts, snap_radius=rng.choice([0.0, 5.0]))

def _op_elbow(rng, s, lib):
    if not s.pipes:
        return
    pid = rng.choice(sorted(s.pipes))
    editops.insert_elbow(s, pid, rng.uniform(0.1, 0.45), rng.uniform(0.5, 0.9),
                         rng.choice(AXES), 50.0 * rng.randint(1, 4))

def _op_extend(rng, s, lib):
    if not s.pipes:
        return
    ref, _ = _existing_end(rng, s)
    pipe = s.pipes[ref.pipe]
    fixed = pipe.b if ref.end == "a" else pipe.a
    sign = rng.choice([-1.0, 1.0, 1.0])
    new_len = 100.0 * rng.randint(1, 14) * sign
    target = fixed + pipe.direction().scaled(
        new_len if ref.end == "b" else -new_len)
    editops.extend_pipe(s, ref, target)

def _op_move_point(rng, s, lib):
    if not s.pipes:
        return
    ref, pt = _existing_end(rng, s)
    shift = rng.choice(AXES).vector.scaled(100.0 * rng.randint(1, 5))
    editops.move_point(s, ref, pt + shift, rng.choice(["all", "all", "only"]))

def _op_connect(rng, s, lib):
    connect_something(rng, s)

def _op_disconnect(rng, s, lib):
    if not s.connections:
        return
    editops.disconnect_ends(s, rng.choice(sorted(s.connections)))

def _op_cut(rng, s, lib):
    if not s.pipes:
        return
    pid = rng.choice(sorted(s.pipes))
    editops.cut_pipe(s, pid, rng.uniform(0.15, 0.85))

def _op_merge(rng, s, lib):
    if not s.pipes:
        return
    pid = rng.choice(sorted(s.pipes))
    editops.merge_pipes(s, pid, rng.choice(["a", "b"]))

def _op_delete_pipe(rng, s, lib):
    if len(s.pipes) <= 2:
        return
    editops.delete_pipe(s, rng.choice(sorted(s.pipes)))

def _op_delete_part(rng, s, lib):
    live = [oid for _, store in s.stores() for oid in store]
    if len(live) <= 3:
        return
    seed = set(rng.sample(live, rng.randint(1, min(3, len(live)))))
    editops.delete_part(s, seed)

def _op_move_part(rng, s, lib):
    if not s.pipes:
        return
    pipes = set(rng.sample(sorted(s.pipes),
                           rng.randint(1, min(3, len(s.pipes)))))
    editops.move_part(s, pipes, rng.choice(AXES).vector.scaled(200.0))

def _op_move_branch(rng, s, lib):
    if not s.pipes:
        return
    pid = rng.choice(sorted(s.pipes))
    editops.move_branch(s, pid, rng.choice(AXES).vector.scaled(300.0))

def _op_replicate(rng, s, lib):
    if not s.pipes:
        return
    blocks = sorted(s.blocks)
    if blocks and rng.random() < 0.6:
        bid = rng.choice(blocks)
        block = s.blocks[bid]
        if block.attachments:
            axis = s.pipes[block.attachments[0]].direction() \
                if block.attachments[0] in s.pipes else Point3(1, 0, 0)
            editops.replicate(s, {bid}, axis.scaled(150.0), rng.randint(1, 2))
            return
    pid = rng.choice(sorted(s.pipes))
    selection = editops.branch_of(s, pid)
    selection = editops.plan_delete_part(s, selection)
    editops.replicate(s, selection, Point3(0, 0, 2000.0 * rng.randint(1, 3)),
                      1)

def _op_offset(rng, s, lib):
    if not s.pipes:
        return
    add_random_offset(rng, s)

def _op_level(rng, s, lib):
    if not s.pipes:
        return
    if not s.height_marks:
        add_random_mark(rng, s)
        return
    mark = rng.choice(sorted(s.height_marks))
    editops.set_level(s, mark, rng.randint(-4, 9) * 0.5)

def _op_move_scheme(rng, s, lib):
    editops.move_scheme(s, (10.0 * rng.randint(-5, 5), 10.0 * rng.randint(-5, 5)))

def _op_place_valve(rng, s, lib):
    if not s.pipes:
        return
    place_random_valve(rng, s, lib)

def _op_place_elbow_block(rng, s, lib):
    groups: dict[tuple, list[int]] = {}
    for pid in s.pipes:
        for end in ("a", "b"):
            pt = s.pipes[pid].end_point(end)
            key = (round(pt.x, 3), round(pt.y, 3), round(pt.z, 3))
            groups.setdefault(key, []).append(pid)
    corners = [(k, v) for k, v in groups.items() if len(set(v)) >= 2]
    if not corners:
        return
    key, pids = rng.choice(corners)
    pids = sorted(set(pids))[:2]
    place_block(s, lib, "elbow_90", Point3(*key), snap_radius=3.0,
                extra_pipes=pids[1:])

def _op_replace_block(rng, s, lib):
    if not s.blocks:
        return
    from axonpipe.symbols import replace_block
    bid = rng.choice(sorted(s.blocks))
    replace_block(s, lib, bid, rng.choice(["gate_valve_8", "gate_valve_100",
                                           "elbow_90"]))

def _op_dimension(rng, s, lib):
    add_random_dimension(rng, s)

def _op_text(rng, s, lib):
    add_random_text(rng, s)

def _op_designator(rng, s, lib):
    add_random_designator(rng, s)

def _op_mark(rng, s, lib):
    add_random_mark(rng, s)

def _op_main_leader(rng, s, lib):
    pool = sorted(s.texts) + sorted(s.designators)
    if not pool:
        return
    oid = rng.choice(pool)
    annotate.change_main_leader(s, oid, rng.randint(0, 2))


FUZZ_OPS = [
    (_op_add_pipe, 5), (_op_sketch, 3), (_op_elbow, 2), (_op_extend, 3),
    (_op_move_point, 3), (_op_connect, 4), (_op_disconnect, 2), (_op_cut, 3),
    (_op_merge, 2), (_op_delete_pipe, 2), (_op_delete_part, 2),
    (_op_move_part, 2), (_op_move_branch, 2), (_op_replicate, 1),
    (_op_offset, 2), (_op_level, 2), (_op_move_scheme, 1),
    (_op_place_valve, 3), (_op_place_elbow_block, 2), (_op_replace_block, 1),
    (_op_dimension, 3), (_op_text, 2), (_op_designator, 2), (_op_mark, 2),
    (_op_main_leader, 1),
]

_OPS = [op for op, _ in FUZZ_OPS]
_WEIGHTS = [w for _, w in FUZZ_OPS]


def seeded_scheme(rng: random.Random, library: Library) -> Scheme:
    scheme = Scheme()
    editops.sketch_line(scheme, [Point3(0, 0, 0), Point3(1000, 0, 0),
                                 Point3(1000, 800, 0), Point3(1000, 800, 600)])
    place_block(scheme, library, "gate_valve_100", Point3(500, 0, 0),
                snap_radius=3.0, position_t=0.5)
    annotate.place_height_mark(scheme, 1, 0.0, 0.0)
    return scheme


def drive_random_ops(rng: random.Random, scheme: Scheme, library: Library,
                     n_ops: int, check) -> int:
    """Apply up to n_ops random operations; run ``check(scheme)`` after every
    applied op. Returns the number of ops that actually ran."""
    applied = 0
    for _ in range(n_ops):
        op = rng.choices(_OPS, weights=_WEIGHTS)[0]
        try:
            op(rng, scheme, library)
        except KernelError:
            continue
        applied += 1
        check(scheme)
    return applied
