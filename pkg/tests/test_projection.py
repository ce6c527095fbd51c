import math

import pytest
from hypothesis import given, strategies as st

from axonpipe.errors import BadStep
from axonpipe.geometry import Point3
from axonpipe.model import Scheme
from axonpipe.projection import (
    ISOMETRIC,
    PRESETS,
    Projection,
    axes_glyph,
    fly_around,
    orthogonalize,
    project,
    rotated_about_z,
    snap,
)

coord = st.floats(min_value=-1e5, max_value=1e5, allow_nan=False)


def close2(a, b, tol=1e-9):
    return math.hypot(a[0] - b[0], a[1] - b[1]) <= tol


def test_project_origin():
    assert project(Point3(0, 0, 0), ISOMETRIC) == (0.0, 0.0)


def test_project_unit_x_isometric():
    x, y = project(Point3(1000, 0, 0), ISOMETRIC)
    assert abs(x - (-866.025)) < 1e-3
    assert abs(y - (-500.0)) < 1e-3


def test_project_z_axis_is_vertical():
    assert close2(project(Point3(0, 0, 1000), ISOMETRIC), (0.0, 1000.0))


def test_presets_exist():
    assert "isometric" in PRESETS and "frontal_dimetric" in PRESETS
    fd = PRESETS["frontal_dimetric"]
    assert close2(fd.ey, (1.0, 0.0)) and close2(fd.ez, (0.0, 1.0))


def test_degenerate_projection_rejected():
    with pytest.raises(ValueError):
        Projection(ex=(1.0, 0.0), ey=(2.0, 0.0), ez=(0.0, 1.0))


@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord))
def test_project_linearity(p, q):
    pp, qq = Point3(*p), Point3(*q)
    lhs = project(pp + qq, ISOMETRIC)
    rhs_x = project(pp, ISOMETRIC)[0] + project(qq, ISOMETRIC)[0]
    rhs_y = project(pp, ISOMETRIC)[1] + project(qq, ISOMETRIC)[1]
    scale = max(1.0, pp.norm(), qq.norm())
    assert abs(lhs[0] - rhs_x) <= 1e-9 * scale
    assert abs(lhs[1] - rhs_y) <= 1e-9 * scale


# ---------------------------------------------------------------------------
# orthogonalize


def test_orthogonalize_dominant_axis():
    assert orthogonalize(Point3(0, 0, 0), Point3(998, 3, 0)) == Point3(998, 0, 0)


def test_orthogonalize_tie_prefers_x():
    assert orthogonalize(Point3(0, 0, 0), Point3(5, 5, 5)) == Point3(5, 0, 0)


def test_orthogonalize_zero_delta():
    assert orthogonalize(Point3(1, 1, 1), Point3(1, 1, 1)) == Point3(1, 1, 1)


@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord))
def test_orthogonalize_single_axis_delta(prev, raw):
    p, r = Point3(*prev), Point3(*raw)
    out = orthogonalize(p, r)
    diffs = [abs(out.component(i) - p.component(i)) > 0 for i in range(3)]
    assert sum(diffs) <= 1


# ---------------------------------------------------------------------------
# snap


def test_snap_to_nearest_end(f1):
    s, _ = f1
    assert snap(s, Point3(999.5, 0, 0), 1.0) == Point3(1000, 0, 0)


def test_snap_nothing_near(f1):
    s, _ = f1
    raw = Point3(500, 500, 500)
    assert snap(s, raw, 1.0) == raw


def test_snap_tie_lower_id_wins():
    s = Scheme()
    a = s.add_pipe(Point3(0, 0, 0), Point3(100, 0, 0))       # end at x=100
    b = s.add_pipe(Point3(200, 0, 0), Point3(300, 0, 0))     # end at x=200
    hit = snap(s, Point3(150, 0, 0), 60.0)
    assert hit == Point3(100, 0, 0)
    assert a < b


def test_snap_never_moves_farther_than_radius(f1):
    s, _ = f1
    raw = Point3(995.0, 2.0, 1.0)
    out = snap(s, raw, 30.0)
    assert raw.dist(out) <= 30.0


# ---------------------------------------------------------------------------
# fly around


def frames_close(a: Projection, b: Projection, tol=1e-9) -> bool:
    return (close2(a.ex, b.ex, tol) and close2(a.ey, b.ey, tol)
            and close2(a.ez, b.ez, tol))


def test_fly_around_full_turn_90():
    frames = fly_around(ISOMETRIC, 90.0, 4)
    assert len(frames) == 5
    assert frames_close(frames[4], frames[0])


def test_fly_around_full_turn_120():
    frames = fly_around(ISOMETRIC, 120.0, 3)
    assert frames_close(frames[3], frames[0])


def test_fly_around_rotation_identity():
    frames = fly_around(ISOMETRIC, 30.0, 1)
    p = Point3(1000, 0, 0)
    ang = math.radians(-30.0)
    rotated = Point3(p.x * math.cos(ang) - p.y * math.sin(ang),
                     p.x * math.sin(ang) + p.y * math.cos(ang), p.z)
    assert close2(project(p, frames[1]), project(rotated, ISOMETRIC), 1e-9 * 1000)


def test_fly_around_zero_step_rejected():
    with pytest.raises(BadStep):
        fly_around(ISOMETRIC, 0.0, 3)


def test_rotated_projection_stays_valid():
    p = rotated_about_z(ISOMETRIC, 37.0)
    assert isinstance(p, Projection)


# ---------------------------------------------------------------------------
# axes glyph


def test_axes_glyph_z_arrow():
    items = axes_glyph(ISOMETRIC)
    arrows = [g for g in items if g.label is None]
    labels = [g for g in items if g.label is not None]
    assert len(arrows) == 3 and len(labels) == 3
    z_arrow = arrows[2]
    assert close2(z_arrow.end, (0.0, 10.0))
    assert [l.label for l in labels] == ["X", "Y", "Z"]
