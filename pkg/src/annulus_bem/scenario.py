"""The levitation setup: coil above which a thin aluminium plate floats,
enclosed by two fictitious circles.  FEM data on both circles comes from an
external solver; everything between them is handled by the boundary solve.

Plate sample points are given in the plate frame (relative to its centroid)
and moved rigidly by the pose.  The default eight points, four along the top
edge and four along the bottom edge, are a convention: the exact locations
behind the shipped reference tables are unknown.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .coupling_io import (
    ErrorReport,
    FemBoundaryData,
    ReferenceTable,
    fixture_text,
    read_reference_table,
    relative_error_report,
)
from .errors import ConfigError, ScenarioError
from .field import interior_potentials
from .geometry import AnnulusMesh, Classification, build_annulus
from .oracle import HarmonicReference, flux_errors
from .system import BoundarySolution, assemble, solve_dirichlet_to_neumann


@dataclass(frozen=True)
class PlatePose:
    """Absolute displacement of the plate from its initial placement."""

    dx: float = 0.0
    dy: float = 0.0
    angle_deg: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.dx, self.dy, self.angle_deg)):
            raise ConfigError("pose must be finite")

    def apply(self, centroid, local_points) -> np.ndarray:
        """Rotate plate-frame points about the centroid, then translate."""
        th = math.radians(self.angle_deg)
        rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        local = np.atleast_2d(np.asarray(local_points, dtype=float))
        return local @ rot.T + np.asarray(centroid, dtype=float) + np.array([self.dx, self.dy])


# "2 mm upward and 2 mm left-wise, rotated by 10 degrees"
DISTURBED = PlatePose(dx=-0.002, dy=0.002, angle_deg=10.0)


def plate_pose(which: str) -> PlatePose:
    which = which.lower()
    if which == "initial":
        return PlatePose()
    if which == "disturbed":
        return DISTURBED
    raise ConfigError(f"unknown pose {which!r}; expected 'initial' or 'disturbed'")


def default_plate_points(width: float, thickness: float) -> list:
    xs = [-width / 2, -width / 6, width / 6, width / 2]
    return [[x, thickness / 2] for x in xs] + [[x, -thickness / 2] for x in xs]


@dataclass
class ScenarioConfig:
    outer_radius: float = 0.100
    inner_radius: float = 0.015
    outer_center: list = field(default_factory=lambda: [0.0, 0.0])
    inner_center: list = field(default_factory=lambda: [0.0, 0.0])
    n_outer: int = 40
    n_inner: int = 40
    start_angle: float = 0.0
    coil_amplitude: float = 200.0
    coil_frequency: float = 50.0
    # carried for the record; only the external FEM step uses these
    conductivity: float = 3.7e7
    coil_turns: int = 960
    wire_diameter: float = 1.2e-3
    plate_centroid: list = field(default_factory=lambda: [0.0, 0.018])
    plate_width: float = 0.065
    plate_thickness: float = 0.001
    pose: object = "initial"
    plate_points: list | None = None
    reference_fixture: str | None = None
    reference_stand_in: bool = False
    convergence_n: list = field(default_factory=lambda: [20, 40, 80, 160])
    convergence_outer_radius: float = 2.0
    convergence_inner_radius: float = 1.0
    harmonic_reference: dict = field(default_factory=lambda: {"kind": "log_r", "center": [0.0, 0.0]})

    def __post_init__(self):
        if not (self.outer_radius > 0 and self.inner_radius > 0):
            raise ConfigError("radii must be positive")
        if self.inner_radius >= self.outer_radius:
            raise ConfigError("inner radius must be smaller than outer radius")
        if self.n_outer < 3 or self.n_inner < 3:
            raise ConfigError("need at least 3 elements per circle")
        if not self.coil_frequency > 0:
            raise ConfigError("coil frequency must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def resolved_pose(self) -> PlatePose:
        if isinstance(self.pose, PlatePose):
            return self.pose
        if isinstance(self.pose, str):
            return plate_pose(self.pose)
        if isinstance(self.pose, dict):
            return PlatePose(**self.pose)
        raise ConfigError(f"bad pose {self.pose!r}")

    def local_plate_points(self) -> np.ndarray:
        pts = self.plate_points or default_plate_points(self.plate_width, self.plate_thickness)
        return np.asarray(pts, dtype=float)

    def sample_points(self) -> np.ndarray:
        return self.resolved_pose().apply(self.plate_centroid, self.local_plate_points())

    def mesh(self) -> AnnulusMesh:
        return build_annulus(
            self.outer_center, self.outer_radius, self.inner_center, self.inner_radius,
            self.n_outer, self.n_inner, self.start_angle,
        )

    def reference(self) -> HarmonicReference:
        spec = dict(self.harmonic_reference)
        kind = spec.pop("kind", None)
        try:
            return HarmonicReference(kind, **{k: tuple(v) if k == "center" else v for k, v in spec.items()})
        except TypeError as exc:
            raise ConfigError(f"bad harmonic_reference: {exc}") from exc


def coil_current(t: float, cfg: ScenarioConfig | None = None) -> float:
    cfg = cfg or ScenarioConfig()
    return cfg.coil_amplitude * math.sin(2.0 * math.pi * cfg.coil_frequency * t)


@dataclass
class ScenarioResult:
    solution: BoundarySolution
    sample_points: np.ndarray
    potentials: np.ndarray
    report: ErrorReport | None = None


def load_reference(name_or_path: str) -> ReferenceTable:
    if name_or_path in ("table1", "table2"):
        return read_reference_table(fixture_text(name_or_path))
    with open(name_or_path, encoding="utf-8") as fh:
        return read_reference_table(fh.read())


def run_scenario(cfg: ScenarioConfig, fem_data: FemBoundaryData, reference: ReferenceTable | None = None) -> ScenarioResult:
    """FEM boundary data -> fluxes -> plate potentials (-> error table)."""
    mesh = cfg.mesh()
    if len(fem_data.entries) != len(mesh):
        raise ConfigError(f"FEM data has {len(fem_data.entries)} entries, mesh has {len(mesh)}")
    sol = solve_dirichlet_to_neumann(assemble(mesh), fem_data.a_values, mesh=mesh)
    pts = cfg.sample_points()
    cls = mesh.classify(pts)
    bad = [(tuple(p), c.value) for p, c in zip(pts.tolist(), cls) if c is not Classification.INTERIOR]
    if bad:
        raise ScenarioError(f"plate sample points outside the annulus: {bad}", bad)
    values = interior_potentials(sol, pts)
    if reference is None and cfg.reference_fixture:
        reference = load_reference(cfg.reference_fixture)
    report = None
    if reference is not None:
        if cfg.reference_stand_in:
            table = reference
        else:
            if len(reference.rows) != len(values):
                raise ConfigError(
                    f"reference has {len(reference.rows)} rows but there are {len(values)} sample points"
                )
            table = ReferenceTable(
                tuple((m, float(v)) for (m, _), v in zip(reference.rows, values)), reference.label
            )
        report = relative_error_report(table)
    return ScenarioResult(sol, pts, values, report)


@dataclass(frozen=True)
class ConvergenceRecord:
    rows: tuple  # (n_total, max_error, avg_error)

    def __post_init__(self):
        ns = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("element counts must be strictly increasing")


def convergence_study(
    reference: HarmonicReference,
    n_list,
    outer_radius: float = 2.0,
    inner_radius: float = 1.0,
    outer_center=(0.0, 0.0),
    inner_center=(0.0, 0.0),
) -> ConvergenceRecord:
    """Flux error against the analytic reference for each total element count."""
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ConfigError("empty element-count list")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError(f"element counts must be strictly increasing, got {n_list}")
    if any(n < 8 or n % 2 for n in n_list):
        raise ConfigError(f"element counts must be even and at least 8, got {n_list}")
    rows = []
    for n in n_list:
        mesh = build_annulus(outer_center, outer_radius, inner_center, inner_radius, n // 2, n // 2)
        sol = solve_dirichlet_to_neumann(assemble(mesh), reference.value(mesh.midpoints), mesh=mesh)
        err = flux_errors(sol.p_bar, reference.flux(mesh.midpoints, mesh.normals))
        rows.append((n, float(err.max()), float(err.mean())))
    return ConvergenceRecord(tuple(rows))
