import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_bem import BoundaryElement, build_annulus, discretize_circle
from annulus_bem.errors import DataError
from annulus_bem.kernel import KernelCase, evaluate, f1, f2, kernel_tables, quadratic_coeffs
from annulus_bem.oracle import f1_quadrature, f2_quadrature

UNIT = BoundaryElement.from_points((0, 0), (1, 0), (0, 1))

# frozen from the quadrature oracle (rel_tol 1e-12) and the exact expressions
F1_ABOVE = (math.log(1.25) - 2 + 4 * math.atan(0.5)) / (4 * math.pi)
F1_SELF = (math.log(0.5) - 1) / (2 * math.pi)
F2_ABOVE = -2 * math.atan(0.5) / (2 * math.pi)


def test_frozen_values_match_oracle():
    assert F1_ABOVE == pytest.approx(6.1861e-3, abs=5e-7)
    assert F2_ABOVE == pytest.approx(-0.1475836, abs=1e-7)
    assert f1_quadrature(UNIT, (0.5, 1)) == pytest.approx(F1_ABOVE, rel=1e-12)
    assert f1_quadrature(UNIT, (0.5, 0), 1e-10) == pytest.approx(F1_SELF, rel=1e-10)
    assert f2_quadrature(UNIT, (0.5, 1)) == pytest.approx(F2_ABOVE, rel=1e-12)


def test_quadratic_coeffs():
    q = quadratic_coeffs(UNIT, (0.5, 1))
    assert q == pytest.approx((1.0, -1.0, 1.25, 4.0))
    q = quadratic_coeffs(UNIT, (0.5, 0))
    assert q == pytest.approx((1.0, -1.0, 0.25, 0.0))
    elem = BoundaryElement.from_points((0.3, -1.2), (2.0, 0.7))
    q = quadratic_coeffs(elem, elem.start)
    assert q.e == 0.0 and q.disc == 0.0


@settings(max_examples=100, deadline=None)
@given(
    pts=st.lists(st.floats(-5, 5), min_size=6, max_size=6),
    t=st.floats(0, 1),
)
def test_quadratic_is_squared_distance(pts, t):
    x0, y0, x1, y1, xi, eta = pts
    if math.hypot(x1 - x0, y1 - y0) < 1e-3:
        return
    elem = BoundaryElement.from_points((x0, y0), (x1, y1))
    a, b, e, disc = quadratic_coeffs(elem, (xi, eta))
    px, py = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
    dist2 = (px - xi) ** 2 + (py - eta) ** 2
    assert a * t * t + b * t + e == pytest.approx(dist2, rel=1e-9, abs=1e-9)
    assert disc == pytest.approx(4 * a * e - b * b, abs=1e-9 * max(a * e, b * b, 1))
    assert disc >= 0


def test_f1_examples():
    assert f1(UNIT, (0.5, 1)) == pytest.approx(F1_ABOVE, rel=1e-14)
    kv = evaluate(UNIT, (0.5, 0))
    assert kv.case_used is KernelCase.SELF_SINGULAR
    assert kv.f1 == pytest.approx(F1_SELF, rel=1e-14)
    assert evaluate(UNIT, (0.5, 1)).case_used is KernelCase.REGULAR


def test_f1_translation():
    shifted = BoundaryElement.from_points((10, -3), (11, -3), (0, 1))
    assert f1(shifted, (10.5, -2)) == pytest.approx(f1(UNIT, (0.5, 1)), abs=1e-14)


def test_f2_examples():
    assert f2(UNIT, (0.5, 1)) == pytest.approx(F2_ABOVE, rel=1e-14)
    assert f2(UNIT, (0.5, 0)) == 0.0
    # on the supporting line, outside the segment
    assert f2(UNIT, (3.0, 0.0)) == 0.0
    assert f2(UNIT, (-0.7, 0.0)) == 0.0


def test_endpoint_field_finite():
    for fld in [(0.0, 0.0), (1.0, 0.0)]:
        kv = evaluate(UNIT, fld)
        assert math.isfinite(kv.f1) and kv.f2 == 0.0
        assert kv.f1 == pytest.approx(f1_quadrature(UNIT, fld), rel=1e-8)


def test_nan_rejected():
    with pytest.raises(DataError):
        f1(UNIT, (float("nan"), 0))
    with pytest.raises(DataError):
        kernel_tables([[0, 0]], [[1, 0]], [[0, 1]], [[np.inf, 0]])


def test_points_very_close_to_element_stay_regular():
    # a point 1e-9 lengths above the midpoint sees half the element's angle
    for h in (1e-7, 1e-9):
        kv = evaluate(UNIT, (0.5, h))
        assert kv.case_used is KernelCase.REGULAR
        assert kv.f2 == pytest.approx(f2_quadrature(UNIT, (0.5, h)), rel=1e-9)
        assert kv.f2 == pytest.approx(-0.5, abs=1e-6)


def _random_element(rng):
    start = rng.uniform(-1, 1, 2)
    theta = rng.uniform(0, 2 * np.pi)
    length = rng.uniform(0.1, 2)
    return BoundaryElement.from_points(start, start + length * np.array([np.cos(theta), np.sin(theta)]))


@pytest.mark.parametrize("seed", range(5))
def test_oracle_agreement_sample(seed):
    rng = np.random.default_rng(seed)
    for _ in range(60):
        elem = _random_element(rng)
        fld = rng.uniform(-3, 3, 2)
        assert f1(elem, fld) == pytest.approx(f1_quadrature(elem, fld), abs=1e-10 * max(1, abs(f1(elem, fld))))
        assert f2(elem, fld) == pytest.approx(f2_quadrature(elem, fld), abs=1e-10)


def _rotate(p, th, shift):
    c, s = math.cos(th), math.sin(th)
    return (c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1])


@settings(max_examples=100, deadline=None)
@given(
    th=st.floats(0, 2 * math.pi),
    sx=st.floats(-3, 3),
    sy=st.floats(-3, 3),
    fx=st.floats(-2, 3),
    fy=st.floats(-2, 2),
)
def test_rigid_invariance(th, sx, sy, fx, fy):
    if abs(fy) < 1e-3 and -0.1 < fx < 1.1:
        return
    elem = BoundaryElement.from_points((0, 0), (1, 0))
    moved = BoundaryElement.from_points(_rotate((0, 0), th, (sx, sy)), _rotate((1, 0), th, (sx, sy)))
    fld = _rotate((fx, fy), th, (sx, sy))
    assert f1(moved, fld) == pytest.approx(f1(elem, (fx, fy)), abs=1e-13)
    assert f2(moved, fld) == pytest.approx(f2(elem, (fx, fy)), abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(s=st.floats(1e-3, 1e3), fx=st.floats(-2, 3), fy=st.floats(-2, 2))
def test_scaling_law(s, fx, fy):
    elem = BoundaryElement.from_points((0.2, 0.1), (1.1, -0.3))
    big = BoundaryElement.from_points((0.2 * s, 0.1 * s), (1.1 * s, -0.3 * s))
    l = elem.length
    expected = s * f1(elem, (fx, fy)) + s * l / (2 * math.pi) * math.log(s)
    assert f1(big, (fx * s, fy * s)) == pytest.approx(expected, abs=1e-12 * max(1, s, abs(expected)))
    assert f2(big, (fx * s, fy * s)) == pytest.approx(f2(elem, (fx, fy)), abs=1e-12)


@pytest.mark.parametrize("n", [3, 7, 40])
def test_gauss_identity_single_loop(n):
    elems = discretize_circle((0.3, -0.1), 1.7, n)
    starts = np.array([e.start for e in elems])
    ends = np.array([e.end for e in elems])
    normals = np.array([e.normal for e in elems])
    mids = (starts + ends) / 2
    inside = np.array([[0.3, -0.1], [0.5, 0.2], [-0.4, -0.3]])
    outside = np.array([[5.0, 0.0], [0.3, 2.5], [-3, -3]])
    _, f2_in = kernel_tables(starts, ends, normals, inside)
    _, f2_out = kernel_tables(starts, ends, normals, outside)
    _, f2_mid = kernel_tables(starts, ends, normals, mids)
    assert np.allclose(f2_in.sum(axis=1), 1.0, atol=1e-12, rtol=0)
    assert np.allclose(f2_out.sum(axis=1), 0.0, atol=1e-12, rtol=0)
    assert np.allclose(f2_mid.sum(axis=1), 0.5, atol=1e-12, rtol=0)
    assert np.all(np.diag(f2_mid) == 0.0)


def test_tables_match_scalar_calls():
    mesh = build_annulus((0, 0), 2, (0, 0), 1, 6, 5)
    pts = np.array([[1.5, 0.1], [0.2, -1.4]])
    t1, t2 = kernel_tables(mesh.starts, mesh.ends, mesh.normals, pts)
    for m, p in enumerate(pts):
        for k, e in enumerate(mesh.elements()):
            assert t1[m, k] == f1(e, p)
            assert t2[m, k] == f2(e, p)
