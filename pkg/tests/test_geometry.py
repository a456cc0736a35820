import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_bem import (
    BoundaryElement,
    Classification,
    GeometryError,
    InvalidMeshError,
    Orientation,
    build_annulus,
    classify_point,
    discretize_circle,
)

S2 = 1 / math.sqrt(2)


def test_square_ccw():
    elems = discretize_circle((0, 0), 1.0, 4, Orientation.CCW, 0.0)
    assert len(elems) == 4
    for e in elems:
        assert e.length == pytest.approx(math.sqrt(2), abs=1e-15)
    first = elems[0]
    assert first.start == pytest.approx((1, 0), abs=1e-15)
    assert first.end == pytest.approx((0, 1), abs=1e-15)
    assert first.midpoint == pytest.approx((0.5, 0.5), abs=1e-15)
    assert first.normal == pytest.approx((S2, S2), abs=1e-15)


def test_square_cw_reverses_chords():
    ccw = discretize_circle((0, 0), 1.0, 4, Orientation.CCW)
    cw = discretize_circle((0, 0), 1.0, 4, Orientation.CW)
    assert cw[0].normal == pytest.approx((-S2, -S2), abs=1e-15)
    for k, b in enumerate(cw):
        a = ccw[-k % 4]
        assert b.start == pytest.approx(tuple(a.end), abs=1e-15)
        assert b.end == pytest.approx(tuple(a.start), abs=1e-15)
        assert b.normal == pytest.approx(tuple(-c for c in a.normal), abs=1e-15)


def test_chord_length_small_circle():
    elems = discretize_circle((0, 0.018), 0.015, 40)
    expected = 2 * 0.015 * math.sin(math.pi / 40)
    assert expected == pytest.approx(2.35377e-3, rel=1e-5)
    for e in elems:
        assert e.length == pytest.approx(expected, rel=1e-13)
    # independent check: the polygon perimeter approaches the circumference
    assert sum(e.length for e in elems) == pytest.approx(2 * math.pi * 0.015, rel=2e-3)


@pytest.mark.parametrize("n, radius", [(2, 1.0), (40, 0.0), (40, -1.0)])
def test_discretize_rejects(n, radius):
    with pytest.raises(InvalidMeshError):
        discretize_circle((0, 0), radius, n)


def test_annulus_normals_point_away_from_region():
    mesh = build_annulus((0, 0), 2.0, (0, 0), 1.0, 40, 40)
    assert len(mesh) == 80
    dots = np.einsum("ij,ij->i", mesh.normals, mesh.midpoints)
    assert np.all(dots[:40] > 0)
    assert np.all(dots[40:] < 0)


def test_levitation_annulus_perimeter():
    mesh = build_annulus((0, 0), 0.100, (0, 0), 0.015, 40, 40)
    x = math.pi / 40
    assert mesh.perimeter == pytest.approx(2 * math.pi * 0.115 * math.sin(x) / x, rel=1e-13)


@pytest.mark.parametrize(
    "oc, ro, ic, ri",
    [
        ((0, 0), 0.015, (0, 0), 0.10),
        ((0, 0), 1.0, (0.6, 0), 0.5),
        ((0, 0), 1.0, (0, 0), 1.0),
    ],
)
def test_annulus_containment(oc, ro, ic, ri):
    with pytest.raises(GeometryError):
        build_annulus(oc, ro, ic, ri, 10, 10)


def test_classify_examples():
    mesh = build_annulus((0, 0), 2.0, (0, 0), 1.0, 40, 40)
    ef = classify_point(mesh, (1.5, 0))
    assert ef.classification is Classification.INTERIOR and ef.value == 1.0
    ef = classify_point(mesh, (0, 0))
    assert ef.classification is Classification.EXTERIOR and ef.value == 0.0
    ef = classify_point(mesh, mesh.elements()[0].midpoint, 1e-12)
    assert ef.classification is Classification.ON_BOUNDARY and ef.value == 0.5
    assert classify_point(mesh, (3, 0)).classification is Classification.EXTERIOR


def test_classify_rejects_negative_tol():
    mesh = build_annulus((0, 0), 2.0, (0, 0), 1.0, 8, 8)
    with pytest.raises(ValueError):
        classify_point(mesh, (1.5, 0), -1.0)


def test_explicit_normal_validation():
    e = BoundaryElement.from_points((0, 0), (1, 0), (0, 1))
    assert e.normal == (0, 1)
    with pytest.raises(InvalidMeshError):
        BoundaryElement.from_points((0, 0), (1, 0), (1, 0))
    with pytest.raises(InvalidMeshError):
        BoundaryElement.from_points((0, 0), (1, 0), (0, 2))
    with pytest.raises(InvalidMeshError):
        BoundaryElement.from_points((1, 1), (1, 1))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(3, 200),
    radius=st.floats(1e-3, 1e3),
    cx=st.floats(-10, 10),
    cy=st.floats(-10, 10),
    start=st.floats(-math.pi, math.pi),
    ccw=st.booleans(),
)
def test_loop_closure_and_normals(n, radius, cx, cy, start, ccw):
    orient = Orientation.CCW if ccw else Orientation.CW
    elems = discretize_circle((cx, cy), radius, n, orient, start)
    total = np.sum([np.subtract(e.end, e.start) for e in elems], axis=0)
    assert np.all(np.abs(total) <= 1e-12 * max(1.0, radius))
    for k, e in enumerate(elems):
        assert e.end == elems[(k + 1) % n].start
        d = np.subtract(e.end, e.start)
        assert abs(math.hypot(*e.normal) - 1) <= 1e-12
        assert abs(np.dot(e.normal, d)) <= 1e-12 * e.length
        outward = np.dot(e.normal, np.subtract(e.midpoint, (cx, cy)))
        assert (outward > 0) == ccw


def test_perimeter_converges_second_order():
    errs = []
    for n in (16, 32, 64):
        elems = discretize_circle((0, 0), 1.0, n)
        errs.append(2 * math.pi - sum(e.length for e in elems))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.02)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.02)


def test_classification_matches_exact_circles():
    mesh = build_annulus((0, 0), 2.0, (0.3, -0.2), 0.7, 40, 40)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2.5, 2.5, size=(4000, 2))
    r_out = np.hypot(*pts.T)
    r_in = np.hypot(pts[:, 0] - 0.3, pts[:, 1] + 0.2)
    sag_out = 2.0 * (1 - math.cos(math.pi / 40))
    sag_in = 0.7 * (1 - math.cos(math.pi / 40))
    safe = (np.abs(r_out - 2.0) > sag_out) & (np.abs(r_in - 0.7) > sag_in)
    expected = (r_out < 2.0) & (r_in > 0.7)
    got = mesh.classify(pts[safe]) == Classification.INTERIOR
    assert np.array_equal(got, expected[safe])
