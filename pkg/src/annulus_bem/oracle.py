"""Independent checks: adaptive quadrature of the element integrals and
analytic harmonic functions to drive end-to-end solves.

Nothing in here calls the closed-form kernels, so agreement between the two
is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError
from .geometry import BoundaryElement, BoundaryMesh, Classification, as_point

# 15-point Kronrod rule with its embedded 7-point Gauss rule (QUADPACK qk15).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

# At most this many refinement sweeps; each sweep bisects every panel whose
# local estimate is too large, so the finest panel is 2**-MAX_LEVELS wide.
MAX_LEVELS = 60
MAX_PANELS = 20000


def adaptive_integrate(f, breakpoints, rel_tol: float, abs_floor: float = 0.0) -> float:
    """Integrate a vectorised ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Panels are bisected until the Gauss/Kronrod differences summed over all
    panels fall below ``rel_tol`` times the integral of ``|f|`` (plus
    ``abs_floor``).  Scaling by the integral of ``|f|`` rather than by
    ``|integral|`` keeps cancelling integrands from stalling refinement.  A
    sweep bisects every panel whose error exceeds an even share of the
    budget, which also handles integrable endpoint singularities since the
    rule never evaluates panel endpoints.
    """
    edges = np.asarray(breakpoints, dtype=float)
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    val = np.empty(0)
    err = np.empty(0)
    absval = np.empty(0)
    new_a, new_b = a, b
    a = b = np.empty(0)
    for _ in range(MAX_LEVELS):
        half = 0.5 * (new_b - new_a)
        mid = 0.5 * (new_a + new_b)
        fx = f(mid[:, None] + half[:, None] * _NODES[None, :])
        kron = half * (fx @ _WEIGHTS_K)
        a = np.concatenate([a, new_a])
        b = np.concatenate([b, new_b])
        val = np.concatenate([val, kron])
        err = np.concatenate([err, np.abs(kron - half * (fx @ _WEIGHTS_G))])
        absval = np.concatenate([absval, half * (np.abs(fx) @ _WEIGHTS_K)])
        budget = rel_tol * absval.sum() + abs_floor
        if err.sum() <= budget:
            return float(val.sum())
        split = err > budget / len(err)
        if len(err) + split.sum() > MAX_PANELS:
            break
        m = 0.5 * (a[split] + b[split])
        new_a = np.concatenate([a[split], m])
        new_b = np.concatenate([m, b[split]])
        a, b = a[~split], b[~split]
        val, err, absval = val[~split], err[~split], absval[~split]
    achieved = float(err.sum())
    raise ConvergenceError(
        f"quadrature did not reach rel_tol={rel_tol:g} (error estimate {achieved:.3e})",
        achieved,
    )


def _check_tol(rel_tol):
    if not (0.0 < rel_tol <= 1e-2):
        raise ConfigError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")


def _local_frame(elem: BoundaryElement, fld):
    """Position of the field relative to the element, in units of its length.

    Returns ``(l, t_star, h)``: the element length, the parameter of the
    closest point on the supporting line and the scaled perpendicular
    distance.  Integrating in ``u = t - t_star`` keeps full precision near the
    peak of the integrand, where ``start + t * (end - start) - field`` would
    cancel.
    """
    fld = as_point(fld)
    sx, sy = elem.start
    dx, dy = elem.end.x - sx, elem.end.y - sy
    l2 = dx * dx + dy * dy
    rx, ry = fld.x - sx, fld.y - sy
    t_star = (rx * dx + ry * dy) / l2
    h = abs(rx * dy - ry * dx) / l2
    return math.sqrt(l2), t_star, h


def _breaks(t_star, h):
    """Panel edges in ``u``, graded geometrically towards ``u = 0``.

    A peak of width ``h`` is invisible to a wide Kronrod panel, so edges are
    placed at ``+- h * 4**k``.
    """
    lo, hi = -t_star, 1.0 - t_star
    pts = [lo, hi]
    if lo < 0.0 < hi:
        pts.append(0.0)
    if h > 0.0:
        step = h
        while step < hi - lo:
            pts.extend(u for u in (-step, step) if lo < u < hi)
            step *= 4.0
    return sorted(pts)


def f1_quadrature(elem: BoundaryElement, fld, rel_tol: float = 1e-12) -> float:
    """Adaptive quadrature of ``(l/4pi) * int_0^1 ln(|p(t) - field|^2) dt``."""
    _check_tol(rel_tol)
    length, t_star, h = _local_frame(elem, fld)
    log_a = 2.0 * math.log(length)

    def integrand(u):
        return log_a + np.log(u * u + h * h)

    val = adaptive_integrate(integrand, _breaks(t_star, h), rel_tol)
    return length / (4.0 * math.pi) * val


def f2_quadrature(elem: BoundaryElement, fld, rel_tol: float = 1e-12) -> float:
    """Adaptive quadrature of the normal derivative of the fundamental solution."""
    _check_tol(rel_tol)
    fld = as_point(fld)
    offset = elem.normal.x * (elem.start.x - fld.x) + elem.normal.y * (elem.start.y - fld.y)
    if offset == 0.0:
        return 0.0
    length, t_star, h = _local_frame(elem, fld)
    if h == 0.0:
        # the offset is round-off of an on-line point: the integrand vanishes
        return 0.0

    def integrand(u):
        return 1.0 / (u * u + h * h)

    val = adaptive_integrate(integrand, _breaks(t_star, h), rel_tol)
    return offset / (2.0 * math.pi * length) * val


@dataclass(frozen=True)
class HarmonicReference:
    """Closed-form harmonic function with its gradient.

    ``kind`` is one of ``constant``, ``linear_x``, ``linear_y``, ``log_r``
    (``ln |p - center|``) and ``poly2`` (``x^2 - y^2``).
    """

    kind: str
    c: float = 1.0
    center: tuple = (0.0, 0.0)

    KINDS = ("constant", "linear_x", "linear_y", "log_r", "poly2")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown harmonic reference {self.kind!r}")

    @classmethod
    def constant(cls, c):
        return cls("constant", c=float(c))

    @classmethod
    def log_r(cls, center=(0.0, 0.0)):
        return cls("log_r", center=tuple(as_point(center)))

    def value(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        if self.kind == "constant":
            return np.full(x.shape, self.c)
        if self.kind == "linear_x":
            return x.copy()
        if self.kind == "linear_y":
            return y.copy()
        if self.kind == "log_r":
            return 0.5 * np.log((x - self.center[0]) ** 2 + (y - self.center[1]) ** 2)
        return x * x - y * y

    def gradient(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        if self.kind == "constant":
            gx, gy = np.zeros_like(x), np.zeros_like(y)
        elif self.kind == "linear_x":
            gx, gy = np.ones_like(x), np.zeros_like(y)
        elif self.kind == "linear_y":
            gx, gy = np.zeros_like(x), np.ones_like(y)
        elif self.kind == "log_r":
            ux, uy = x - self.center[0], y - self.center[1]
            r2 = ux * ux + uy * uy
            gx, gy = ux / r2, uy / r2
        else:
            gx, gy = 2.0 * x, -2.0 * y
        return np.stack([gx, gy], axis=-1)

    def flux(self, p, n) -> np.ndarray:
        return np.sum(self.gradient(p) * np.asarray(n, dtype=float), axis=-1)

    def circle_mean(self, center, radius, rel_tol=1e-12) -> float:
        """Mean over a circle by quadrature (equals the centre value if harmonic)."""
        cx, cy = as_point(center)

        def integrand(theta):
            pts = np.stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta)], axis=-1)
            return self.value(pts)

        return adaptive_integrate(integrand, [0.0, 2 * np.pi], rel_tol, abs_floor=1e-300) / (2 * np.pi)


@dataclass
class ErrorSummary:
    n_elements: int
    flux_max_error: float
    flux_avg_error: float
    interior_max_error: float
    interior_avg_error: float
    n_interior: int
    extra: dict = field(default_factory=dict)


def flux_errors(computed, exact) -> np.ndarray:
    """Pointwise relative flux errors.

    Entries whose exact flux is below 1e-3 of the largest are normalised by
    the largest instead; identically zero exact flux gives absolute errors.
    """
    computed = np.asarray(computed, dtype=float)
    exact = np.asarray(exact, dtype=float)
    peak = float(np.max(np.abs(exact)))
    if peak == 0.0:
        return np.abs(computed - exact)
    scale = np.where(np.abs(exact) > 1e-3 * peak, np.abs(exact), peak)
    return np.abs(computed - exact) / scale


MAX_SAMPLE_ROUNDS = 100


def interior_samples(mesh: BoundaryMesh, count: int, seed: int = 0, margin: float | None = None) -> np.ndarray:
    """Deterministic random interior points at least ``margin`` from the boundary.

    The default margin is the longest element length, which keeps the samples
    out of the band where constant elements lose accuracy.
    """
    rng = np.random.default_rng(seed)
    margin = float(mesh.lengths.max()) if margin is None else margin
    lo = np.min(mesh.starts, axis=0)
    hi = np.max(mesh.starts, axis=0)
    out = []
    for _ in range(MAX_SAMPLE_ROUNDS):
        cand = rng.uniform(lo, hi, size=(4 * count, 2))
        good = (mesh.classify(cand) == Classification.INTERIOR) & (
            mesh.distance_to_boundary(cand) >= margin
        )
        out.extend(cand[good])
        if len(out) >= count:
            return np.array(out[:count])
    raise ConfigError(f"found only {len(out)} of {count} interior points at margin {margin}")


def reference_solve_check(reference: HarmonicReference, mesh: BoundaryMesh, n_interior: int = 50, seed: int = 0) -> ErrorSummary:
    """Impose Dirichlet data from ``reference``, solve, and compare with the exact answer."""
    from .field import interior_potentials
    from .system import assemble, solve_dirichlet_to_neumann

    if reference.kind == "log_r":
        cls = mesh.classify([reference.center])[0]
        if cls is not Classification.EXTERIOR:
            raise ConfigError(
                f"log_r centre {reference.center} lies in the solution region ({cls.value})"
            )
    mats = assemble(mesh)
    sol = solve_dirichlet_to_neumann(mats, reference.value(mesh.midpoints), mesh=mesh)
    exact_flux = reference.flux(mesh.midpoints, mesh.normals)
    ferr = flux_errors(sol.p_bar, exact_flux)
    pts = interior_samples(mesh, n_interior, seed)
    ierr = np.abs(interior_potentials(sol, pts) - reference.value(pts))
    return ErrorSummary(
        n_elements=len(mesh),
        flux_max_error=float(ferr.max()),
        flux_avg_error=float(ferr.mean()),
        interior_max_error=float(ierr.max()),
        interior_avg_error=float(ierr.mean()),
        n_interior=len(pts),
        extra={"residual_norm": sol.residual_norm, "condition_estimate": sol.condition_estimate},
    )


# Agreement required between closed forms and quadrature.
REGULAR_TOL = 1e-10
NEAR_SINGULAR_TOL = 1e-6


def random_kernel_cases(seed: int, count: int, near_singular: bool = False):
    """Reproducible ``(element, field)`` pairs.

    Regular cases keep the field at least 0.01 element lengths from the
    element; near-singular cases put it 1e-6 lengths off the element.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        start = rng.uniform(-1.0, 1.0, 2)
        length = rng.uniform(0.1, 2.0)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        tangent = np.array([np.cos(theta), np.sin(theta)])
        elem = BoundaryElement.from_points(start, start + length * tangent)
        normal = np.asarray(elem.normal)
        side = rng.choice([-1.0, 1.0])
        if near_singular:
            u = rng.uniform(0.0, 1.0)
            v = side * 1e-6
        else:
            u = rng.uniform(-1.0, 2.0)
            v = side * rng.uniform(0.01, 2.0)
        fld = start + length * (u * tangent + v * normal)
        cases.append((elem, (float(fld[0]), float(fld[1]))))
    return cases


def kernel_discrepancies(cases, tol: float):
    """Rows of ``(case, kernel, closed_form, quadrature, abs_diff, ok)``."""
    from .kernel import evaluate

    rows = []
    for k, (elem, fld) in enumerate(cases):
        kv = evaluate(elem, fld)
        for name, closed, quad in (
            ("f1", kv.f1, f1_quadrature(elem, fld)),
            ("f2", kv.f2, f2_quadrature(elem, fld)),
        ):
            diff = abs(closed - quad)
            rows.append((k, name, closed, quad, diff, diff <= tol * max(1.0, abs(quad))))
    return rows
