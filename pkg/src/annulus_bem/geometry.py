"""Polygonal boundary meshes and point classification.

Every boundary element is a straight chord carrying one constant value,
collocated at its midpoint.  Normals are ``(dy, -dx) / l``, i.e. they point to
the right of the direction of travel, so a counter-clockwise loop has outward
normals and a clockwise loop has normals pointing towards its centre.  An
annulus is therefore built from a CCW outer loop and a CW inner loop, which
makes every normal point away from the annular region.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError, GeometryError, InvalidMeshError

_UNIT_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DataError(f"non-finite point ({x}, {y})")
    return Point2(x, y)


class Orientation(enum.Enum):
    CCW = "ccw"
    CW = "cw"


class Classification(enum.Enum):
    EXTERIOR = "exterior"
    ON_BOUNDARY = "on_boundary"
    INTERIOR = "interior"


class EdgeFactor(NamedTuple):
    """Coefficient multiplying the potential in the boundary integral identity."""

    value: float
    classification: Classification

    @classmethod
    def of(cls, classification: Classification) -> "EdgeFactor":
        return cls(_LAMBDA[classification], classification)


_LAMBDA = {
    Classification.EXTERIOR: 0.0,
    Classification.ON_BOUNDARY: 0.5,
    Classification.INTERIOR: 1.0,
}


@dataclass(frozen=True)
class BoundaryElement:
    start: Point2
    end: Point2
    normal: Point2

    @classmethod
    def from_points(cls, start, end, normal=None) -> "BoundaryElement":
        """Build an element; the normal defaults to the right-hand one."""
        start, end = as_point(start), as_point(end)
        dx, dy = end.x - start.x, end.y - start.y
        length = math.hypot(dx, dy)
        if not length > 0.0:
            raise InvalidMeshError(f"degenerate element {start} -> {end}")
        if normal is None:
            normal = Point2(dy / length, -dx / length)
        else:
            normal = as_point(normal)
            if abs(math.hypot(*normal) - 1.0) > _UNIT_TOL:
                raise InvalidMeshError(f"normal {normal} is not a unit vector")
            if abs(normal.x * dx + normal.y * dy) > _UNIT_TOL * length:
                raise InvalidMeshError(f"normal {normal} is not orthogonal to the element")
        return cls(start, end, normal)

    @property
    def midpoint(self) -> Point2:
        return Point2(0.5 * (self.start.x + self.end.x), 0.5 * (self.start.y + self.end.y))

    @property
    def length(self) -> float:
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)


def discretize_circle(
    center,
    radius: float,
    n: int,
    orientation: Orientation = Orientation.CCW,
    start_angle: float = 0.0,
) -> list[BoundaryElement]:
    """Split a circle into ``n`` chords.

    Vertices sit at ``start_angle + 2*pi*k/n``.  A clockwise loop visits the
    same vertices backwards, starting from vertex 1: the chords are the same,
    reversed, and element 0 is the reversed counter-clockwise element 0.
    """
    if int(n) != n or n < 3:
        raise InvalidMeshError(f"need at least 3 elements per circle, got {n}")
    if not (radius > 0.0 and math.isfinite(radius)):
        raise InvalidMeshError(f"radius must be positive, got {radius}")
    n = int(n)
    cx, cy = as_point(center)
    k = np.arange(n)
    if Orientation(orientation) is Orientation.CW:
        k = 1 - k
    angles = start_angle + 2.0 * np.pi * k / n
    xs = cx + radius * np.cos(angles)
    ys = cy + radius * np.sin(angles)
    verts = [Point2(float(x), float(y)) for x, y in zip(xs, ys)]
    return [BoundaryElement.from_points(verts[k], verts[(k + 1) % n]) for k in range(n)]


class BoundaryMesh:
    """One or more closed loops of elements, in a fixed global order.

    Vectorised views of the element data (``starts``, ``ends``, ``midpoints``,
    ``lengths``, ``normals``) are what the kernel and assembly code use.
    """

    def __init__(self, loops: Sequence[Sequence[BoundaryElement]]):
        self.loops = tuple(tuple(loop) for loop in loops)
        if not self.loops or any(len(loop) < 3 for loop in self.loops):
            raise InvalidMeshError("every loop needs at least 3 elements")
        for i, loop in enumerate(self.loops):
            for k, elem in enumerate(loop):
                nxt = loop[(k + 1) % len(loop)]
                if elem.end != nxt.start:
                    raise InvalidMeshError(f"loop {i} is not closed at element {k}")

    def elements(self) -> list[BoundaryElement]:
        return [e for loop in self.loops for e in loop]

    def __len__(self) -> int:
        return sum(len(loop) for loop in self.loops)

    @cached_property
    def starts(self) -> np.ndarray:
        return np.array([e.start for e in self.elements()], dtype=float)

    @cached_property
    def ends(self) -> np.ndarray:
        return np.array([e.end for e in self.elements()], dtype=float)

    @cached_property
    def normals(self) -> np.ndarray:
        return np.array([e.normal for e in self.elements()], dtype=float)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.starts + self.ends)

    @cached_property
    def lengths(self) -> np.ndarray:
        d = self.ends - self.starts
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def perimeter(self) -> float:
        return float(self.lengths.sum())

    def boundary_tol(self) -> float:
        """Default on-boundary tolerance, scaled by the mesh extent."""
        extent = float(np.max(np.abs(self.starts)))
        return 1e-9 * max(extent, np.finfo(float).tiny)

    def distance_to_boundary(self, points) -> np.ndarray:
        """Distance from each point to the nearest element segment."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = self.ends - self.starts
        rel = pts[:, None, :] - self.starts[None, :, :]
        t = np.einsum("mnk,nk->mn", rel, d) / np.einsum("nk,nk->n", d, d)
        t = np.clip(t, 0.0, 1.0)
        closest = self.starts[None, :, :] + t[..., None] * d[None, :, :]
        diff = pts[:, None, :] - closest
        return np.min(np.hypot(diff[..., 0], diff[..., 1]), axis=1)

    def contains(self, points) -> np.ndarray:
        """Even-odd test against all loops (points exactly on an edge are unspecified)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        px, py = pts[:, 0:1], pts[:, 1:2]
        x0, y0 = self.starts[:, 0], self.starts[:, 1]
        x1, y1 = self.ends[:, 0], self.ends[:, 1]
        straddles = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        crossings = np.count_nonzero(straddles & (px < x_cross), axis=1)
        return crossings % 2 == 1

    def classify(self, points, boundary_tol: float | None = None) -> np.ndarray:
        """Vectorised classification; returns an object array of Classification."""
        tol = self.boundary_tol() if boundary_tol is None else boundary_tol
        if tol < 0:
            raise ValueError("boundary_tol must be non-negative")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        on = self.distance_to_boundary(pts) <= tol
        inside = self.contains(pts)
        out = np.full(len(pts), Classification.EXTERIOR, dtype=object)
        out[inside] = Classification.INTERIOR
        out[on] = Classification.ON_BOUNDARY
        return out


class AnnulusMesh(BoundaryMesh):
    """Outer CCW loop followed by inner CW loop."""

    def __init__(
        self,
        outer: Sequence[BoundaryElement],
        inner: Sequence[BoundaryElement],
        outer_center,
        outer_radius: float,
        inner_center,
        inner_radius: float,
        start_angle: float = 0.0,
    ):
        super().__init__([outer, inner])
        self.outer, self.inner = self.loops
        self.outer_center = as_point(outer_center)
        self.inner_center = as_point(inner_center)
        self.outer_radius = float(outer_radius)
        self.inner_radius = float(inner_radius)
        self.start_angle = float(start_angle)

    @property
    def n_outer(self) -> int:
        return len(self.outer)

    @property
    def n_inner(self) -> int:
        return len(self.inner)

    def boundary_tol(self) -> float:
        return 1e-9 * self.outer_radius

    def params(self) -> dict:
        """Everything needed to rebuild this mesh with :func:`build_annulus`."""
        return {
            "outer_center": list(self.outer_center),
            "outer_radius": self.outer_radius,
            "inner_center": list(self.inner_center),
            "inner_radius": self.inner_radius,
            "n_outer": self.n_outer,
            "n_inner": self.n_inner,
            "start_angle": self.start_angle,
        }


def build_annulus(
    outer_center,
    outer_radius: float,
    inner_center,
    inner_radius: float,
    n_outer: int,
    n_inner: int,
    start_angle: float = 0.0,
) -> AnnulusMesh:
    oc, ic = as_point(outer_center), as_point(inner_center)
    if not (outer_radius > 0 and inner_radius > 0):
        raise InvalidMeshError("radii must be positive")
    offset = math.hypot(ic.x - oc.x, ic.y - oc.y)
    if offset + inner_radius >= outer_radius:
        raise GeometryError(
            f"inner circle (r={inner_radius}, centre offset {offset}) is not strictly "
            f"inside the outer circle (r={outer_radius})"
        )
    outer = discretize_circle(oc, outer_radius, n_outer, Orientation.CCW, start_angle)
    inner = discretize_circle(ic, inner_radius, n_inner, Orientation.CW, start_angle)
    return AnnulusMesh(outer, inner, oc, outer_radius, ic, inner_radius, start_angle)


def classify_point(mesh: BoundaryMesh, p, boundary_tol: float | None = None) -> EdgeFactor:
    if boundary_tol is not None and boundary_tol < 0:
        raise ValueError("boundary_tol must be non-negative")
    return EdgeFactor.of(mesh.classify([as_point(p)], boundary_tol)[0])
