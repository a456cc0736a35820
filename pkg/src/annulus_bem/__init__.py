"""Constant-element boundary element solver for Laplace problems on annuli.

Typical use::

    mesh = build_annulus((0, 0), 0.1, (0, 0), 0.015, 40, 40)
    sol = solve_dirichlet_to_neumann(assemble(mesh), a_bar, mesh=mesh)
    value = interior_potential(sol, (0.0, 0.05))
"""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    BemError,
    ConfigError,
    ConvergenceError,
    DataError,
    DomainError,
    FormatError,
    GeometryError,
    InputDataError,
    InvalidMeshError,
    NumericalError,
    ScenarioError,
    SolverError,
    VersionError,
)
from .geometry import (
    AnnulusMesh,
    BoundaryElement,
    BoundaryMesh,
    Classification,
    EdgeFactor,
    Orientation,
    Point2,
    build_annulus,
    classify_point,
    discretize_circle,
)
from .kernel import evaluate, f1, f2, kernel_tables, quadratic_coeffs
from .system import (
    BcKind,
    BoundaryCondition,
    BoundarySolution,
    InfluenceMatrices,
    assemble,
    collocation_residual,
    solve_dirichlet_to_neumann,
    solve_mixed,
)
from .field import (
    FieldGrid,
    FieldSample,
    GridSpec,
    boundary_potential,
    field_map,
    interior_potential,
    interior_potentials,
)
from .coupling_io import (
    FemBoundaryData,
    ReferenceTable,
    parse_fem_csv,
    read_solution,
    relative_error_report,
    write_fem_csv,
    write_solution,
)
from .scenario import (
    PlatePose,
    ScenarioConfig,
    coil_current,
    convergence_study,
    plate_pose,
    run_scenario,
)
from .oracle import HarmonicReference, f1_quadrature, f2_quadrature, reference_solve_check
