import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chermnykh.equilibria import triangular_points
from chermnykh.errors import SingularityAtPrimary
from chermnykh.model import build_system, classical, effective_potential
from chermnykh.zvc import (
    _cell_segments,
    critical_levels,
    encloses,
    loops_around,
    polygon_area,
    region_classify,
    write_contours_csv,
    zvc_contours,
)

BOX = (-2.0, 2.0, -2.0, 2.0)


def vertex_residual(cs, p):
    worst = 0.0
    for pl in cs.polylines:
        for x, y in pl:
            worst = max(worst, abs(2 * effective_potential(x, y, p) - cs.level))
    return worst


def test_empty_above_grid_max():
    cs = zvc_contours(1e6, BOX, 64, classical(0.025))
    assert len(cs) == 0 and cs.polylines == []


def test_resolution_floor():
    with pytest.raises(ValueError):
        zvc_contours(3.5, BOX, 15, classical(0.025))


def test_loop_below_L4_level_documented_example():
    # documented example: closed curve around L4 at C_L4 - 1e-3
    p = classical(0.025)
    l4, _ = triangular_points(p)
    cs = zvc_contours(critical_levels(p)["L4"] - 1e-3, (-1.5, 1.5, -1.5, 1.5), 256, p)
    assert loops_around(cs, l4.x, l4.y)


def test_loop_above_L4_level():
    # L4 is a local minimum of 2 Omega, so the small loop exists just above its level
    p = classical(0.025)
    l4, _ = triangular_points(p)
    cs = zvc_contours(critical_levels(p)["L4"] + 1e-3, (-1.5, 1.5, -1.5, 1.5), 256, p)
    loops = loops_around(cs, l4.x, l4.y)
    assert len(loops) == 1
    assert abs(polygon_area(loops[0])) < 0.05
    l5 = (l4.x, -l4.y)
    assert len(loops_around(cs, *l5)) == 1


def test_topology_at_35():
    p = classical(0.025)
    cs = zvc_contours(3.5, BOX, 200, p)
    assert len(cs) == 3 and all(cs.closed_flags)
    (x1, _), (x2, _) = p.primaries
    around1 = loops_around(cs, x1, 0.0)
    around2 = loops_around(cs, x2, 0.0)
    outer = [pl for pl in cs.polylines if encloses(pl, x1, 0.0) and encloses(pl, x2, 0.0)]
    assert len(outer) == 1
    assert len(around1) == 2 and len(around2) == 2  # own oval plus the outer boundary
    # far from the primaries 2 Omega ~ r^2 + 2/r, which equals 3.5 near r = 1.45
    r = np.hypot(outer[0][:, 0], outer[0][:, 1])
    assert r.min() > 1.3 and r.max() < 1.6


def test_closed_polylines_repeat_first_point():
    cs = zvc_contours(3.5, BOX, 64, classical(0.025))
    for pl, closed in zip(cs.polylines, cs.closed_flags):
        if closed:
            assert tuple(pl[0]) == tuple(pl[-1])


def test_ordering_by_first_vertex():
    cs = zvc_contours(3.2, BOX, 128, classical(0.025))
    firsts = [tuple(pl[0]) for pl in cs.polylines]
    assert firsts == sorted(firsts)


def test_deterministic():
    p = build_system(0.025, q1=0.75, Mb=0.1, core_b=0.01, rc_override=0.9999)
    a = zvc_contours(3.3, BOX, 100, p)
    b = zvc_contours(3.3, BOX, 100, p)
    assert len(a) == len(b)
    assert all(np.array_equal(x, y) for x, y in zip(a.polylines, b.polylines))


def test_open_polyline_at_boundary():
    cs = zvc_contours(3.5, (0.5, 2.0, -0.3, 0.3), 64, classical(0.025))
    assert not all(cs.closed_flags)


def test_primary_cells_masked():
    # a very high level puts tiny ovals around each primary; the primary cells are skipped
    p = classical(0.3)
    cs = zvc_contours(60.0, (-1.0, 1.5, -1.0, 1.0), 250, p)
    for (px, py) in p.primaries:
        loops = loops_around(cs, px, py)
        assert len(loops) == 1
        d = np.hypot(loops[0][:, 0] - px, loops[0][:, 1] - py)
        assert d.min() > 0.01


def test_saddle_resolution_by_center():
    vals = (1.0, -1.0, 1.0, -1.0)
    # centre on the positive side: corners 0 and 2 connect, corners 1 and 3 are cut off
    assert _cell_segments(vals, 0.5) == [(0, 1), (2, 3)]
    assert _cell_segments(vals, -0.5) == [(3, 0), (1, 2)]
    assert _cell_segments((1.0, 1.0, 1.0, 1.0), 0.0) == []
    assert _cell_segments((1.0, -1.0, -1.0, -1.0), 0.0) == [(0, 3)]


def test_csv_format():
    cs = zvc_contours(3.5, BOX, 32, classical(0.025))
    buf = io.StringIO()
    write_contours_csv(cs, buf, {"mu": 0.025})
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0] == "# level=3.5"
    assert lines[1] == "# mu=0.025"
    assert lines[2] == "x,y"
    blocks = text.split("x,y\n")[1].strip("\n").split("\n\n")
    assert len(blocks) == len(cs)
    x, y = map(float, blocks[0].splitlines()[0].split(","))
    assert (x, y) == tuple(cs.polylines[0][0])


def test_region_classify():
    p = classical(0.025)
    l4, _ = triangular_points(p)
    c4 = 2 * effective_potential(l4.x, l4.y, p)
    assert region_classify(l4.x, l4.y, c4, p) == "allowed"
    assert region_classify(l4.x, l4.y, c4 + 1e-6, p) == "forbidden"
    assert region_classify(100.0, 100.0, 1e4, p) == "allowed"
    with pytest.raises(SingularityAtPrimary):
        region_classify(-0.025, 0.0, 3.0, p)


def test_critical_levels_classical():
    mu = 0.025
    lv = critical_levels(classical(mu))
    assert lv["L4"] == pytest.approx(3 - mu * (1 - mu), abs=1e-13)
    assert lv["L4"] == pytest.approx(2.975625, abs=1e-13)
    assert lv["L4"] == lv["L5"]
    assert lv["L1"] > lv["L4"]


def test_area_and_enclosure_helpers():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    assert polygon_area(sq) == 1.0
    assert polygon_area(sq[::-1]) == -1.0
    assert encloses(sq, 0.5, 0.5) and not encloses(sq, 1.5, 0.5)


@pytest.mark.parametrize("level", [3.0, 3.3, 3.6])
def test_vertex_residual_converges(level):
    p = build_system(0.025, q1=0.9, A2=0.005, Mb=0.05, core_b=0.01)
    r_coarse = vertex_residual(zvc_contours(level, BOX, 64, p), p)
    r_fine = vertex_residual(zvc_contours(level, BOX, 127, p), p)  # half the spacing
    assert r_fine <= r_coarse / 2 * 1.3


@settings(max_examples=15)
@given(st.floats(2.9, 4.0), st.floats(0.01, 0.5), st.floats(0.3, 1.0))
def test_mirror_symmetry(level, mu, q1):
    p = build_system(mu, q1=q1)
    cs = zvc_contours(level, BOX, 48, p)
    # closed loops repeat their first vertex, so compare vertex sets
    pts = np.vstack(cs.polylines) if cs.polylines else np.zeros((0, 2))
    a = np.unique(np.round(pts, 9), axis=0)
    b = np.unique(np.round(pts * np.array([1.0, -1.0]), 9), axis=0)
    assert a.shape == b.shape
    assert np.max(np.abs(a - b), initial=0.0) < 1e-8


def test_l4_loop_area_shrinks_with_q1_above_level():
    areas = []
    for q1 in (1.0, 0.75, 0.5, 0.25):
        p = build_system(0.025, q1=q1, core_b=0.01, rc_override=0.9999)
        l4, _ = triangular_points(p)
        cs = zvc_contours(critical_levels(p)["L4"] + 1e-3, (-1.5, 1.5, -1.5, 1.5), 256, p)
        loops = loops_around(cs, l4.x, l4.y)
        assert len(loops) == 1
        areas.append(abs(polygon_area(loops[0])))
    assert all(a >= b for a, b in zip(areas, areas[1:]))
