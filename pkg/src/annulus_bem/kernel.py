"""Closed-form element integrals of the 2D Laplace fundamental solution.

With ``G = ln(|x - field|^2) / (4 pi)`` and an element parametrised as
``p(t) = start + t * (end - start)``, ``t in [0, 1]``::

    f1 = int_elem G ds        = (l / 4pi) int_0^1 ln S(t) dt
    f2 = int_elem dG/dn ds    = (l d / 2pi) int_0^1 dt / S(t)

where ``S(t) = a t^2 + b t + e`` is the squared distance and ``d`` the
(constant) normal offset ``n . (start - field)``.

Both functions broadcast: ``starts``/``ends``/``normals`` of shape ``(N, 2)``
and ``fields`` of shape ``(M, 2)`` give ``(M, N)`` tables.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np

from .errors import DataError
from .geometry import BoundaryElement, as_point

# Relative threshold below which 4ae - b^2 counts as zero (field on the
# element's supporting line).  The discriminant is formed from a cross
# product, not from 4ae - b^2 itself, so collinear points land near 1e-31.
SINGULAR_THRESHOLD = 1e-24

_FOUR_PI = 4.0 * np.pi


class KernelCase(enum.Enum):
    REGULAR = "regular"
    SELF_SINGULAR = "self_singular"


class QuadraticCoeffs(NamedTuple):
    a: float
    b: float
    e: float
    disc: float


class KernelValue(NamedTuple):
    f1: float
    f2: float
    case_used: KernelCase


def _coeffs(starts, ends, fields):
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    fields = np.asarray(fields, dtype=float)
    dx = ends[..., 0] - starts[..., 0]
    dy = ends[..., 1] - starts[..., 1]
    rx = starts[..., 0] - fields[..., 0]
    ry = starts[..., 1] - fields[..., 1]
    a = dx * dx + dy * dy
    b = 2.0 * (rx * dx + ry * dy)
    e = rx * rx + ry * ry
    cross = dx * ry - dy * rx
    # 4ae - b^2 == 4 * cross^2 exactly; the right side avoids cancellation
    disc = 4.0 * cross * cross
    singular = disc <= SINGULAR_THRESHOLD * (4.0 * a * e + b * b)
    return a, b, e, disc, cross, singular


def _check_finite(*arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise DataError("non-finite coordinates passed to kernel")


def _xlogx_abs(x):
    """``x * ln|x|`` with the limit 0 at x = 0."""
    ax = np.abs(x)
    return np.where(ax > 0.0, x * np.log(np.where(ax > 0.0, ax, 1.0)), 0.0)


def _angle(b, e, root):
    # atan((2a+b)/root) - atan(b/root), i.e. the angle the element subtends
    # at the field point; the atan2 form keeps full precision close to it
    return np.arctan2(root, 2.0 * e + b)


def _f1_table(a, b, e, disc, singular, angle):
    length = np.sqrt(a)
    beta = b / (2.0 * a)
    root = np.sqrt(np.where(singular, 0.0, disc))
    with np.errstate(divide="ignore", invalid="ignore"):
        # S(0)/a and S(1)/a; both positive off the supporting line
        s0 = e / a
        s1 = 1.0 + b / a + e / a
        regular = (
            2.0 * (np.log(length) - 1.0)
            - beta * np.log(s0)
            + (1.0 + beta) * np.log(s1)
            + root / a * angle
        )
    # S(t) = a (t + beta)^2 on the supporting line
    degenerate = 2.0 * (np.log(length) - 1.0) + 2.0 * (_xlogx_abs(1.0 + beta) - _xlogx_abs(beta))
    return length / _FOUR_PI * np.where(singular, degenerate, regular)


def _f2_table(cross, orient, singular, angle):
    # l d / sqrt(disc) is exactly -orient * sign(cross) / 2 because d equals
    # -orient * cross / l; using the sign avoids dividing two tiny numbers
    # when the field point is close to the element
    return np.where(singular, 0.0, -orient * np.sign(cross) * angle / (2.0 * np.pi))


def kernel_tables(starts, ends, normals, fields):
    """Return ``(f1, f2)`` tables with shape ``(M, N)`` for M fields, N elements."""
    starts = np.asarray(starts, dtype=float)[None, :, :]
    ends = np.asarray(ends, dtype=float)[None, :, :]
    normals = np.asarray(normals, dtype=float)[None, :, :]
    fields = np.atleast_2d(np.asarray(fields, dtype=float))[:, None, :]
    _check_finite(starts, ends, normals, fields)
    a, b, e, disc, cross, singular = _coeffs(starts, ends, fields)
    d = ends - starts
    # +1 for the right-hand normal (dy, -dx) / l, -1 for the opposite one
    orient = np.sign(normals[..., 0] * d[..., 1] - normals[..., 1] * d[..., 0])
    angle = _angle(b, e, np.sqrt(np.where(singular, 1.0, disc)))
    return _f1_table(a, b, e, disc, singular, angle), _f2_table(cross, orient, singular, angle)


def quadratic_coeffs(elem: BoundaryElement, field) -> QuadraticCoeffs:
    field = as_point(field)
    a, b, e, disc, *_ = _coeffs(np.asarray(elem.start), np.asarray(elem.end), np.asarray(field))
    return QuadraticCoeffs(float(a), float(b), float(e), float(disc))


def evaluate(elem: BoundaryElement, field) -> KernelValue:
    field = as_point(field)
    f1, f2 = kernel_tables([elem.start], [elem.end], [elem.normal], [field])
    *_, singular = _coeffs(np.asarray(elem.start), np.asarray(elem.end), np.asarray(field))
    case = KernelCase.SELF_SINGULAR if singular else KernelCase.REGULAR
    return KernelValue(float(f1[0, 0]), float(f2[0, 0]), case)


def f1(elem: BoundaryElement, field) -> float:
    return evaluate(elem, field).f1


def f2(elem: BoundaryElement, field) -> float:
    return evaluate(elem, field).f2
