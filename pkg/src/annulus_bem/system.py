"""Collocation matrices and the dense boundary solve.

At every collocation midpoint ``M`` (where the edge factor is 1/2)::

    1/2 A_M = sum_K A_K f2[M, K] - P_K f1[M, K]

so for all-Dirichlet data the unknown fluxes follow from
``f1 @ P = (f2 - I/2) @ A``.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, DataError, SolverError
from .geometry import BoundaryMesh
from .kernel import kernel_tables

logger = logging.getLogger(__name__)

COND_WARN = 1e12


@dataclass(frozen=True)
class InfluenceMatrices:
    f1: np.ndarray
    f2: np.ndarray
    mesh: BoundaryMesh | None = None

    @property
    def n(self) -> int:
        return self.f1.shape[0]

    def permuted(self, perm) -> "InfluenceMatrices":
        """Relabel elements: new element ``i`` is old element ``perm[i]``."""
        perm = np.asarray(perm)
        return InfluenceMatrices(self.f1[np.ix_(perm, perm)], self.f2[np.ix_(perm, perm)])


class BcKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class BoundaryCondition:
    kinds: tuple
    values: np.ndarray

    def __post_init__(self):
        kinds = tuple(BcKind(k) for k in self.kinds)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(kinds),):
            raise ConfigError("one value per element is required")
        if not np.all(np.isfinite(values)):
            raise DataError("boundary values must be finite")
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "values", values)

    @classmethod
    def dirichlet(cls, values) -> "BoundaryCondition":
        values = np.asarray(values, dtype=float)
        return cls((BcKind.DIRICHLET,) * len(values), values)

    @classmethod
    def from_dicts(
        cls, n: int, dirichlet: Mapping[int, float] = {}, neumann: Mapping[int, float] = {}
    ) -> "BoundaryCondition":
        """Build from 0-based ``{element: value}`` maps; each element exactly once."""
        both = set(dirichlet) & set(neumann)
        if both:
            raise ConfigError(f"elements given both kinds of data: {sorted(both)}")
        missing = set(range(n)) - set(dirichlet) - set(neumann)
        if missing:
            raise ConfigError(f"elements without boundary data: {sorted(missing)}")
        extra = (set(dirichlet) | set(neumann)) - set(range(n))
        if extra:
            raise ConfigError(f"element indices out of range: {sorted(extra)}")
        kinds = [BcKind.DIRICHLET if k in dirichlet else BcKind.NEUMANN for k in range(n)]
        values = [dirichlet[k] if k in dirichlet else neumann[k] for k in range(n)]
        return cls(tuple(kinds), np.array(values, dtype=float))

    @property
    def is_dirichlet(self) -> np.ndarray:
        return np.array([k is BcKind.DIRICHLET for k in self.kinds])


@dataclass
class BoundarySolution:
    a_bar: np.ndarray
    p_bar: np.ndarray
    mesh: BoundaryMesh | None
    residual_norm: float
    condition_estimate: float
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.a_bar)


def assemble(mesh: BoundaryMesh) -> InfluenceMatrices:
    """Row ``M`` holds the integrals over every element seen from midpoint ``M``."""
    f1, f2 = kernel_tables(mesh.starts, mesh.ends, mesh.normals, mesh.midpoints)
    return InfluenceMatrices(f1, f2, mesh)


def collocation_residual(mats: InfluenceMatrices, a_bar, p_bar) -> np.ndarray:
    """Per-row residual of ``1/2 A = f2 A - f1 P``."""
    a_bar = np.asarray(a_bar, dtype=float)
    return mats.f2 @ a_bar - mats.f1 @ np.asarray(p_bar, dtype=float) - 0.5 * a_bar


def _dense_solve(matrix, rhs):
    """LU with partial pivoting plus a LAPACK 1-norm condition estimate."""
    try:
        with warnings.catch_warnings():
            # exact singularity is reported below as a SolverError
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(matrix, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"factorisation failed: {exc}") from exc
    if np.any(np.diag(lu) == 0.0):
        raise SolverError("matrix is exactly singular", float("inf"))
    (gecon,) = sla.get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, np.linalg.norm(matrix, 1), norm="1")
    cond = float("inf") if rcond == 0.0 else 1.0 / rcond
    if rcond < np.finfo(float).eps:
        raise SolverError(f"matrix is numerically singular (condition ~ {cond:.3e})", cond)
    return sla.lu_solve((lu, piv), rhs), cond


def _finish(mats, a_bar, p_bar, cond, warnings):
    resid = collocation_residual(mats, a_bar, p_bar)
    if cond > COND_WARN:
        msg = f"ill-conditioned boundary system (condition ~ {cond:.3e})"
        logger.warning(msg)
        warnings.append(msg)
    return BoundarySolution(
        a_bar=a_bar,
        p_bar=p_bar,
        mesh=mats.mesh,
        residual_norm=float(np.max(np.abs(resid))),
        condition_estimate=cond,
        warnings=warnings,
    )


def solve_dirichlet_to_neumann(mats: InfluenceMatrices, a_bar, mesh: BoundaryMesh | None = None) -> BoundarySolution:
    a_bar = np.array(a_bar, dtype=float)
    if a_bar.shape != (mats.n,):
        raise ConfigError(f"expected {mats.n} Dirichlet values, got shape {a_bar.shape}")
    if not np.all(np.isfinite(a_bar)):
        raise DataError("Dirichlet data must be finite")
    rhs = mats.f2 @ a_bar - 0.5 * a_bar
    p_bar, cond = _dense_solve(mats.f1, rhs)
    sol = _finish(mats, a_bar, p_bar, cond, [])
    if mesh is not None:
        sol.mesh = mesh
    return sol


def solve_mixed(mats: InfluenceMatrices, bc: BoundaryCondition) -> BoundarySolution:
    """Solve for the complementary datum on every element.

    Columns of Dirichlet elements multiply the unknown flux (coefficient
    ``f1``); columns of Neumann elements multiply the unknown potential
    (coefficient ``I/2 - f2``).  Known data moves to the right-hand side.
    """
    if len(bc.kinds) != mats.n:
        raise ConfigError(f"boundary condition covers {len(bc.kinds)} of {mats.n} elements")
    dir_mask = bc.is_dirichlet
    known = bc.values
    half_eye = 0.5 * np.eye(mats.n)
    a_known = np.where(dir_mask, known, 0.0)
    p_known = np.where(dir_mask, 0.0, known)
    matrix = np.where(dir_mask[None, :], mats.f1, half_eye - mats.f2)
    rhs = (mats.f2 - half_eye) @ a_known - mats.f1 @ p_known
    warnings = []
    if not dir_mask.any():
        lengths = mats.mesh.lengths if mats.mesh is not None else np.ones(mats.n)
        net = float(known @ lengths)
        scale = float(np.abs(known) @ lengths)
        if abs(net) > 1e-8 * max(scale, np.finfo(float).tiny):
            warnings.append(
                f"pure Neumann data violates compatibility: net flux {net:.3e}; "
                "the potential is only defined up to a constant"
            )
        else:
            warnings.append("pure Neumann data: the potential is only defined up to a constant")
        for w in warnings:
            logger.warning(w)
    try:
        z, cond = _dense_solve(matrix, rhs)
    except SolverError as exc:
        if warnings:
            raise SolverError(f"{exc}; {warnings[0]}", exc.condition_estimate) from exc
        raise
    a_bar = np.where(dir_mask, known, z)
    p_bar = np.where(dir_mask, z, known)
    return _finish(mats, a_bar, p_bar, cond, warnings)
