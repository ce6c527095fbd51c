import pytest

from axonpipe import annotate, editops
from axonpipe.errors import (
    AlreadyConnected,
    BadInterval,
    BadParameter,
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
from axonpipe.geometry import AxisDir, Point3
from axonpipe.model import Leader, PipeEndRef, Scheme, integrity_check
from axonpipe.symbols import place_block

from oracles import branch_oracle, closure_oracle, isomorphic


def pts(scheme, pid):
    p = scheme.pipes[pid]
    return (p.a, p.b)


# ---------------------------------------------------------------------------
# sketch_line


def test_sketch_orthogonalizes_and_connects():
    s = Scheme()
    ids = editops.sketch_line(
        s, [Point3(0, 0, 0), Point3(998, 3, 0), Point3(998, -2, 995)])
    assert len(ids) == 2
    assert pts(s, ids[0]) == (Point3(0, 0, 0), Point3(998, 0, 0))
    assert pts(s, ids[1]) == (Point3(998, 0, 0), Point3(998, 0, 995))
    assert len(s.connections) == 1
    assert integrity_check(s) == []


def test_sketch_degenerate():
    s = Scheme()
    with pytest.raises(DegenerateLine):
        editops.sketch_line(s, [Point3(0, 0, 0), Point3(0, 0, 0)])


def test_sketch_free_ends_not_connected(f1):
    s, ids = f1
    before = set(s.connections)
    new = editops.sketch_line(s, [Point3(0, 0, 0), Point3(-500, 2, 0)],
                              snap_radius=5.0)
    # the line starts exactly on P1.a, yet no connection to P1 appears
    assert pts(s, new[0])[0] == Point3(0, 0, 0)
    assert set(s.connections) == before
    assert integrity_check(s) == []


def test_sketch_snap_pulls_vertex(f1):
    s, ids = f1
    new = editops.sketch_line(
        s, [Point3(0, 500, 0), Point3(999.5, 500.2, 0.3)], snap_radius=0.0)
    # without snapping the vertex only orthogonalizes
    assert pts(s, new[0])[1] == Point3(999.5, 500, 0)


# ---------------------------------------------------------------------------
# insert_elbow


def elbow_fixture():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    return s, pid


def test_elbow_geometry():
    s, pid = elbow_fixture()
    ids = editops.insert_elbow(s, pid, 0.4, 0.6, AxisDir.PY, 200.0)
    expected = [
        (Point3(0, 0, 0), Point3(400, 0, 0)),
        (Point3(400, 0, 0), Point3(400, 200, 0)),
        (Point3(400, 200, 0), Point3(600, 200, 0)),
        (Point3(600, 200, 0), Point3(600, 0, 0)),
        (Point3(600, 0, 0), Point3(1000, 0, 0)),
    ]
    assert [pts(s, i) for i in ids] == expected
    assert len(s.connections) == 4
    assert integrity_check(s) == []


def test_elbow_dir_parallel():
    s, pid = elbow_fixture()
    with pytest.raises(DirParallelToPipe):
        editops.insert_elbow(s, pid, 0.4, 0.6, AxisDir.PX, 200.0)


def test_elbow_bad_interval():
    s, pid = elbow_fixture()
    with pytest.raises(BadInterval):
        editops.insert_elbow(s, pid, 0.6, 0.4, AxisDir.PY, 200.0)


def test_elbow_preserves_endpoints_and_counts():
    s, pid = elbow_fixture()
    n_pipes, n_conns = len(s.pipes), len(s.connections)
    ids = editops.insert_elbow(s, pid, 0.25, 0.75, AxisDir.NZ, 120.0)
    assert len(s.pipes) - n_pipes == 4
    assert len(s.connections) - n_conns == 4
    assert pts(s, ids[0])[0] == Point3(0, 0, 0)
    assert pts(s, ids[4])[1] == Point3(1000, 0, 0)


def test_elbow_rehomes_annotations(f1):
    s, ids = f1
    mark_t_before = s.height_marks[ids["h"]].t          # 0.25 on P1
    new = editops.insert_elbow(s, ids["p1"], 0.4, 0.6, AxisDir.PY, 200.0)
    mark = s.height_marks[ids["h"]]
    assert mark.pipe == new[0]                          # re-homed to start piece
    assert abs(mark.t - mark_t_before / 0.4) < 1e-12
    block = s.blocks[ids["v"]]
    assert block.attachments == [new[2]]                # valve follows middle
    assert block.position == Point3(500, 200, 0)
    assert integrity_check(s) == []


# ---------------------------------------------------------------------------
# extend_pipe


def test_extend_free_end():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    editops.extend_pipe(s, PipeEndRef(pid, "b"), Point3(1500, 0, 0))
    assert s.pipes[pid].length() == pytest.approx(1500.0)


def test_extend_connected_end_rejected(f1):
    s, ids = f1
    with pytest.raises(EndConnected):
        editops.extend_pipe(s, PipeEndRef(ids["p1"], "b"), Point3(1500, 0, 0))


def test_extend_off_axis_rejected():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    with pytest.raises(OffAxis):
        editops.extend_pipe(s, PipeEndRef(pid, "b"), Point3(1500, 5, 0))


def test_extend_mirror_block_across_fixed_end(library):
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    bid = place_block(s, library, "gate_valve_100", Point3(300, 0, 0),
                      snap_radius=5.0)
    editops.extend_pipe(s, PipeEndRef(pid, "b"), Point3(-800, 0, 0))
    assert s.blocks[bid].position == Point3(-300, 0, 0)
    assert integrity_check(s) == []


def test_extend_shorten_slides_block_to_near_end(library):
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    bid = place_block(s, library, "gate_valve_8", Point3(300, 0, 0),
                      snap_radius=5.0)
    # 8 mm valve at 300; shorten so its interval [296,304] no longer fits
    editops.extend_pipe(s, PipeEndRef(pid, "b"), Point3(250, 0, 0))
    t0, t1 = s.blocks[bid].cut_intervals[pid]
    assert t1 == pytest.approx(1.0)
    assert s.blocks[bid].position.x == pytest.approx(250.0 - 4.0)
    assert integrity_check(s) == []


def test_extend_shorten_spec_values():
    from axonpipe.symbols import Library
    from conftest import gate_valve_symbol
    lib = Library(name="t", symbols={"gv40": gate_valve_symbol(40.0)})
    lib.symbols["gv40"].name = "gv40"
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    bid = place_block(s, lib, "gv40", Point3(300, 0, 0), snap_radius=5.0)
    t0, t1 = s.blocks[bid].cut_intervals[pid]
    assert (t0 * 1000.0, t1 * 1000.0) == (pytest.approx(280.0), pytest.approx(320.0))
    editops.extend_pipe(s, PipeEndRef(pid, "b"), Point3(250, 0, 0))
    t0, t1 = s.blocks[bid].cut_intervals[pid]
    assert (t0 * 250.0, t1 * 250.0) == (pytest.approx(210.0), pytest.approx(250.0))


# ---------------------------------------------------------------------------
# move_point


def test_move_point_all_moves_coincident_ends(f1):
    s, ids = f1
    editops.move_point(s, PipeEndRef(ids["p1"], "b"), Point3(1000, 0, 500))
    assert s.pipes[ids["p1"]].b == Point3(1000, 0, 500)
    assert s.pipes[ids["p2"]].a == Point3(1000, 0, 500)
    assert ids["c12"] in s.connections
    assert integrity_check(s) == []


def test_move_point_only_forbidden_when_connected(f1):
    s, ids = f1
    with pytest.raises(ScopeForbidden):
        editops.move_point(s, PipeEndRef(ids["p1"], "b"), Point3(1000, 0, 500),
                           scope="only")


def test_move_point_only_on_touching_unconnected():
    s = Scheme()
    p1 = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    p2 = s.add_pipe(Point3(1000, 0, 0), Point3(2000, 0, 0))
    editops.move_point(s, PipeEndRef(p1, "b"), Point3(1000, 0, 300),
                       scope="only")
    assert s.pipes[p1].b == Point3(1000, 0, 300)
    assert s.pipes[p2].a == Point3(1000, 0, 0)
    assert integrity_check(s) == []


def test_move_point_collapse_rejected(f1):
    s, ids = f1
    with pytest.raises(ZeroLengthPipe):
        editops.move_point(s, PipeEndRef(ids["p1"], "b"), Point3(0, 0, 0))


# ---------------------------------------------------------------------------
# connect / disconnect


def test_disconnect_then_reconnect_is_identity(f1):
    s, ids = f1
    from axonpipe.persist import scheme_to_dict
    editops.disconnect_ends(s, ids["c12"])
    assert editops.branch_of(s, ids["p1"]) == {ids["p1"]}
    cid = editops.connect_ends(s, PipeEndRef(ids["p1"], "b"),
                               PipeEndRef(ids["p2"], "a"))
    assert cid != ids["c12"]
    assert editops.branch_of(s, ids["p1"]) == {ids["p1"], ids["p2"]}


def test_connect_not_coincident(f1):
    s, ids = f1
    with pytest.raises(NotCoincident):
        editops.connect_ends(s, PipeEndRef(ids["p1"], "a"),
                             PipeEndRef(ids["p2"], "b"))


def test_connect_rejects_gap_of_two_epsilon(f1):
    from axonpipe.geometry import EPS
    s, ids = f1
    near = s.add_pipe(Point3(0, 2 * EPS, 0), Point3(-800, 2 * EPS, 0))
    with pytest.raises(NotCoincident):
        editops.connect_ends(s, PipeEndRef(ids["p1"], "a"),
                             PipeEndRef(near, "a"))


def test_connect_duplicate_pair(f1):
    s, ids = f1
    with pytest.raises(AlreadyConnected):
        editops.connect_ends(s, PipeEndRef(ids["p1"], "b"),
                             PipeEndRef(ids["p2"], "a"))


def test_connect_same_pipe():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    with pytest.raises(SamePipe):
        editops.connect_ends(s, PipeEndRef(pid, "a"), PipeEndRef(pid, "b"))


def test_disconnect_unknown(f1):
    s, _ = f1
    with pytest.raises(UnknownId):
        editops.disconnect_ends(s, 12345)


# ---------------------------------------------------------------------------
# cut / merge


def test_cut_pipe_basic():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    h1, h2 = editops.cut_pipe(s, pid, 0.4)
    assert pts(s, h1) == (Point3(0, 0, 0), Point3(400, 0, 0))
    assert pts(s, h2) == (Point3(400, 0, 0), Point3(1000, 0, 0))
    assert len(s.connections) == 1
    assert integrity_check(s) == []


def test_cut_at_touching_third_pipe_end():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    third = s.add_pipe(Point3(400, 0, 0), Point3(400, 600, 0))
    h1, h2 = editops.cut_pipe(s, pid, 0.4)
    assert len(s.connections) == 3
    assert editops.branch_of(s, third) == {h1, h2, third}
    assert integrity_check(s) == []


def test_cut_bad_parameter():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    with pytest.raises(BadParameter):
        editops.cut_pipe(s, pid, 0.0)


def test_cut_inside_block_interval(f1):
    s, ids = f1
    with pytest.raises(PointOccupied):
        editops.cut_pipe(s, ids["p1"], 0.5)


def test_cut_then_merge_roundtrip(f1):
    s, ids = f1
    snap_before = s.snapshot()
    h1, h2 = editops.cut_pipe(s, ids["p1"], 0.2)
    merged = editops.merge_pipes(s, h1, "b")
    assert isomorphic(s, snap_before)
    assert integrity_check(s) == []


def test_merge_requires_continuation(f1):
    s, ids = f1
    with pytest.raises(NoContinuation):
        editops.merge_pipes(s, ids["p1"], "b")     # P2 is perpendicular


def test_merge_junction_locked_by_dimension():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    h1, h2 = editops.cut_pipe(s, pid, 0.4)
    annotate.add_chain_dimension(
        s, [PipeEndRef(h1, "a"), PipeEndRef(h1, "b")], "x", 1)
    with pytest.raises(JunctionLocked):
        editops.merge_pipes(s, h1, "b")


def test_merge_side_ambiguity():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(3000, 0, 0))
    a, rest = editops.cut_pipe(s, pid, 1.0 / 3.0)
    mid, c = editops.cut_pipe(s, rest, 0.5)
    with pytest.raises(BadParameter):
        editops.merge_pipes(s, mid)                # collinear on both sides
    merged = editops.merge_pipes(s, mid, "a")
    assert s.pipes[merged].a == Point3(0, 0, 0)
    assert integrity_check(s) == []


def test_merge_drops_third_pipe_from_branch():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    third = s.add_pipe(Point3(400, 0, 0), Point3(400, 600, 0))
    h1, h2 = editops.cut_pipe(s, pid, 0.4)          # three connections
    merged = editops.merge_pipes(s, h1, "b")
    assert editops.branch_of(s, third) == {third}
    assert len(s.connections) == 0
    assert integrity_check(s) == []


# ---------------------------------------------------------------------------
# delete


def test_delete_pipe_cascade(f1):
    s, ids = f1
    deleted = editops.delete_pipe(s, ids["p1"])
    assert deleted == {ids["p1"], ids["c12"], ids["v"], ids["h"]}
    assert ids["p2"] in s.pipes
    assert integrity_check(s) == []


def test_delete_pipe_removes_multi_attached_block(f1, library):
    s, ids = f1
    elbow = place_block(s, library, "elbow_90", Point3(1000, 0, 0),
                        snap_radius=5.0, extra_pipes=[ids["p2"]])
    deleted = editops.delete_pipe(s, ids["p1"])
    assert elbow in deleted                       # delete_pipe takes the block
    assert ids["p2"] in s.pipes
    assert integrity_check(s) == []


def test_delete_part_prunes_multi_attached_block(f1, library):
    s, ids = f1
    elbow = place_block(s, library, "elbow_90", Point3(1000, 0, 0),
                        snap_radius=5.0, extra_pipes=[ids["p2"]])
    preview = editops.plan_delete_part(s, {ids["p1"]})
    assert elbow not in preview                   # delete_part prunes instead
    assert preview == closure_oracle(s, {ids["p1"]})
    editops.delete_part(s, {ids["p1"]})
    assert s.blocks[elbow].attachments == [ids["p2"]]
    assert integrity_check(s) == []


def test_delete_dimension_when_one_origin_left(f1):
    s, ids = f1
    did = annotate.add_chain_dimension(
        s, [PipeEndRef(ids["p1"], "b"), PipeEndRef(ids["p2"], "b")], "z", 1)
    editops.delete_pipe(s, ids["p1"])
    assert did not in s.dimensions
    assert integrity_check(s) == []


def test_text_survives_with_pruned_leader(f1):
    s, ids = f1
    tid = annotate.add_leader_text(s, "insulate", [
        Leader(anchor=(0, 0), pipe=ids["p1"], t=0.25),
        Leader(anchor=(0, 0), pipe=ids["p2"], t=0.5),
    ])
    editops.delete_pipe(s, ids["p1"])
    assert len(s.texts[tid].leaders) == 1
    assert s.texts[tid].leaders[0].pipe == ids["p2"]
    assert integrity_check(s) == []


def test_delete_part_preview_leaves_scheme_untouched(f1):
    s, ids = f1
    from axonpipe.persist import scheme_to_dict
    before = scheme_to_dict(s)
    editops.plan_delete_part(s, {ids["p1"]})
    assert scheme_to_dict(s) == before


# ---------------------------------------------------------------------------
# move_part / move_branch


def test_move_part_rigid(f1):
    s, ids = f1
    warnings = editops.move_part(s, {ids["p1"], ids["p2"]}, Point3(0, 0, 100))
    assert warnings == []
    assert s.pipes[ids["p1"]].a == Point3(0, 0, 100)
    assert s.pipes[ids["p2"]].b == Point3(1000, 0, 1100)
    assert ids["c12"] in s.connections
    assert s.blocks[ids["v"]].position == Point3(500, 0, 100)
    assert integrity_check(s) == []


def test_move_part_breaks_connection_with_warning(f1):
    s, ids = f1
    warnings = editops.move_part(s, {ids["p1"]}, Point3(0, 0, 100))
    assert any("connection" in w for w in warnings)
    assert ids["c12"] not in s.connections
    assert integrity_check(s) == []


def test_move_part_zero_shift_is_noop(f1):
    s, ids = f1
    from axonpipe.persist import scheme_to_dict
    before = scheme_to_dict(s)
    assert editops.move_part(s, {ids["p1"]}, Point3(0, 0, 0)) == []
    assert scheme_to_dict(s) == before


def test_move_branch(f1):
    s, ids = f1
    moved = editops.move_branch(s, ids["p1"], Point3(0, 0, 100))
    assert moved == {ids["p1"], ids["p2"]}
    assert moved == branch_oracle(s, ids["p1"])
    assert integrity_check(s) == []


def test_move_branch_isolated_pipe():
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    with pytest.raises(NoConnections):
        editops.move_branch(s, pid, Point3(0, 0, 100))


def test_move_branch_rigidity(f1):
    s, ids = f1
    a0 = s.pipes[ids["p1"]].a
    b0 = s.pipes[ids["p2"]].b
    d_before = a0.dist(b0)
    editops.move_branch(s, ids["p1"], Point3(123, -77, 45))
    d_after = s.pipes[ids["p1"]].a.dist(s.pipes[ids["p2"]].b)
    assert abs(d_before - d_after) <= 1e-9
    dir1 = s.pipes[ids["p1"]].direction()
    assert dir1 == Point3(1, 0, 0)


# ---------------------------------------------------------------------------
# replicate


def valve_on_pipe(library, at=300.0):
    s = Scheme()
    pid = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    bid = place_block(s, library, "gate_valve_100", Point3(at, 0, 0),
                      snap_radius=5.0)
    return s, pid, bid


def test_replicate_single_valve(library):
    s, pid, bid = valve_on_pipe(library)
    maps = editops.replicate(s, {bid}, Point3(200, 0, 0), 2)
    positions = sorted(s.blocks[m[bid]].position.x for m in maps)
    assert positions == [500.0, 700.0]
    assert integrity_check(s) == []


def test_replicate_single_valve_does_not_fit(library):
    s, pid, bid = valve_on_pipe(library)
    with pytest.raises(DoesNotFit):
        editops.replicate(s, {bid}, Point3(200, 0, 0), 4)   # 1100 > 1000
    assert len(s.blocks) == 1


def test_replicate_single_valve_off_pipe(library):
    s, pid, bid = valve_on_pipe(library)
    with pytest.raises(OffPipe):
        editops.replicate(s, {bid}, Point3(0, 200, 0), 1)


def test_replicate_not_closed(f1):
    s, ids = f1
    with pytest.raises(NotClosed):
        editops.replicate(s, {ids["p1"]}, Point3(0, 0, 500), 1)


def test_replicate_whole_group(f1):
    s, ids = f1
    selection = set(ids.values())
    maps = editops.replicate(s, selection, Point3(0, 0, 2000), 2)
    assert len(maps) == 2
    for k, m in enumerate(maps, start=1):
        assert set(m) == selection
        clone = s.pipes[m[ids["p1"]]]
        assert clone.a == Point3(0, 0, 2000 * k)
    # disjoint fresh ids
    new_ids = [nid for m in maps for nid in m.values()]
    assert len(set(new_ids)) == len(new_ids)
    assert set(new_ids).isdisjoint(selection)
    assert integrity_check(s) == []


def test_replicate_copy_isomorphic_to_source(f1):
    s, ids = f1
    selection = set(ids.values())
    maps = editops.replicate(s, selection, Point3(0, 0, 2000), 1)
    copy_ids = set(maps[0].values())
    s_src = s.snapshot()
    editops.delete_part(s_src, copy_ids)
    s_copy = s.snapshot()
    editops.delete_part(s_copy, selection)
    editops.move_part(s_copy, {maps[0][ids["p1"]], maps[0][ids["p2"]]},
                      Point3(0, 0, -2000))
    assert isomorphic(s_src, s_copy)


# ---------------------------------------------------------------------------
# offsets, level, scheme move


def test_set_offset_validates(f1):
    s, ids = f1
    with pytest.raises(BadParameter):
        editops.set_offset(s, "global", ids["p1"], 0.5, 1, (0.0, 0.0))
    with pytest.raises(UnknownId):
        editops.set_offset(s, "global", 999, 0.5, 1, (10.0, 0.0))


def test_set_offset_local_not_crossing(f1):
    s, ids = f1
    with pytest.raises(NotCrossing):
        editops.set_offset(s, "local", ids["p1"], 0.5, 1, (10.0, 0.0),
                           broken=[(ids["p2"], 0.5)], scope_pipe=ids["p2"])


def test_set_offset_never_changes_model(f1):
    s, ids = f1
    coords_before = [(p.a, p.b) for p in s.pipes.values()]
    editops.set_offset(s, "global", ids["p1"], 0.5, 1, (20.0, 0.0))
    assert [(p.a, p.b) for p in s.pipes.values()] == coords_before
    assert integrity_check(s) == []


def test_offset_cascades_on_pipe_delete(f1):
    s, ids = f1
    oid = editops.set_offset(s, "global", ids["p2"], 0.5, 1, (20.0, 0.0))
    editops.delete_pipe(s, ids["p2"])
    assert oid not in s.offsets
    assert integrity_check(s) == []


def test_set_level(f1):
    s, ids = f1
    h2 = annotate.place_height_mark(s, ids["p2"], 1.0, 1.2)
    editops.set_level(s, ids["h"], 2.5)
    assert s.pipes[ids["p1"]].a.z == pytest.approx(2500.0)
    assert s.pipes[ids["p2"]].b.z == pytest.approx(3500.0)
    assert s.height_marks[ids["h"]].level == pytest.approx(2.5)
    assert s.height_marks[h2].level == pytest.approx(3.7)
    assert integrity_check(s) == []


def test_set_level_noop(f1):
    s, ids = f1
    assert editops.set_level(s, ids["h"], 0.0) == 0.0


def test_set_level_unknown(f1):
    s, _ = f1
    with pytest.raises(UnknownId):
        editops.set_level(s, 999, 1.0)


def test_move_scheme_compose(f1):
    s, _ = f1
    editops.move_scheme(s, (100.0, 50.0))
    editops.move_scheme(s, (10.0, -5.0))
    assert s.settings.placement == (110.0, 45.0)


# ---------------------------------------------------------------------------
# atomicity


def test_failed_op_leaves_scheme_untouched(f1, library):
    s, ids = f1
    from axonpipe.persist import scheme_to_dict
    before = scheme_to_dict(s)
    with pytest.raises(PointOccupied):
        editops.cut_pipe(s, ids["p1"], 0.5)       # valve sits there
    assert scheme_to_dict(s) == before
