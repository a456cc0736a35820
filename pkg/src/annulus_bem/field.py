"""Potential evaluation inside the annulus from a solved boundary state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import Classification, EdgeFactor, Point2, as_point
from .kernel import kernel_tables
from .system import BoundarySolution


@dataclass(frozen=True)
class FieldSample:
    point: Point2
    value: float | None
    edge_factor: EdgeFactor
    # within one element length of the boundary, where constant elements
    # are least accurate
    near_boundary: bool = False


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError(f"degenerate grid extent {self}")
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("grid needs at least 2 nodes per axis")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``x0,x1,y0,y1,nx,ny``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 6:
            raise ConfigError(f"grid spec needs 6 comma-separated fields, got {text!r}")
        try:
            x0, x1, y0, y1 = (float(p) for p in parts[:4])
            nx, ny = int(parts[4]), int(parts[5])
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {text!r}: {exc}") from exc
        return cls(x0, x1, y0, y1, nx, ny)

    def points(self) -> np.ndarray:
        """Row-major nodes: x varies fastest."""
        xs = np.linspace(self.x_min, self.x_max, self.nx)
        ys = np.linspace(self.y_min, self.y_max, self.ny)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True)
class FieldGrid:
    spec: GridSpec
    samples: list

    def values(self) -> np.ndarray:
        """``(ny, nx)`` array with NaN where no value is defined."""
        vals = [np.nan if s.value is None else s.value for s in self.samples]
        return np.array(vals, dtype=float).reshape(self.spec.ny, self.spec.nx)


def _require_mesh(sol: BoundarySolution):
    if sol.mesh is None:
        raise ConfigError("solution carries no mesh; cannot evaluate the field")
    return sol.mesh


def _potential_sum(sol: BoundarySolution, pts: np.ndarray) -> np.ndarray:
    mesh = sol.mesh
    f1, f2 = kernel_tables(mesh.starts, mesh.ends, mesh.normals, pts)
    # one reduction over the element axis for every point: identical
    # results whether a point is evaluated alone or in a batch
    terms = sol.a_bar[None, :] * f2 - sol.p_bar[None, :] * f1
    return np.sum(terms, axis=1)


def interior_potentials(sol: BoundarySolution, points) -> np.ndarray:
    mesh = _require_mesh(sol)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cls = mesh.classify(pts)
    bad = np.flatnonzero(cls != Classification.INTERIOR)
    if bad.size:
        i = bad[0]
        raise DomainError(
            f"point ({pts[i, 0]}, {pts[i, 1]}) is {cls[i].value}, not interior", cls[i]
        )
    return _potential_sum(sol, pts)


def interior_potential(sol: BoundarySolution, p) -> float:
    return float(interior_potentials(sol, [as_point(p)])[0])


def boundary_potential(sol: BoundarySolution, element_index: int) -> float:
    """Collocation value of element ``element_index`` (0-based)."""
    if not 0 <= element_index < sol.n:
        raise IndexError(f"element index {element_index} out of range 0..{sol.n - 1}")
    return float(sol.a_bar[element_index])


def sample_points(sol: BoundarySolution, points) -> list:
    """Evaluate wherever defined; other points get ``value=None``."""
    mesh = _require_mesh(sol)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    cls = mesh.classify(pts)
    near = mesh.distance_to_boundary(pts) < float(mesh.lengths.max())
    interior = cls == Classification.INTERIOR
    values = np.full(len(pts), np.nan)
    if interior.any():
        values[interior] = _potential_sum(sol, pts[interior])
    return [
        FieldSample(
            Point2(float(p[0]), float(p[1])),
            float(v) if ok else None,
            EdgeFactor.of(c),
            bool(nb and ok),
        )
        for p, v, c, ok, nb in zip(pts, values, cls, interior, near)
    ]


def field_map(sol: BoundarySolution, grid: GridSpec) -> FieldGrid:
    return FieldGrid(grid, sample_points(sol, grid.points()))
