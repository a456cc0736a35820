"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit codes, so every error a user can trigger
derives from one of the three families below.
"""


class BemError(Exception):
    """Base class for all package errors."""


class ConfigError(BemError, ValueError):
    """Invalid parameters, configuration or preconditions (exit code 2)."""


class InvalidMeshError(ConfigError):
    """Element count or radius out of range."""


class GeometryError(ConfigError):
    """Inner circle not strictly contained in the outer circle."""


class InputDataError(BemError, ValueError):
    """Malformed or inconsistent input files (exit code 3)."""


class FormatError(InputDataError):
    """Missing/duplicate rows, bad headers, unparsable numbers."""


class AlignmentError(InputDataError):
    """FEM sample coordinates do not match the mesh collocation points."""


class DataError(InputDataError):
    """Non-finite or otherwise unusable values."""


class VersionError(InputDataError):
    """Solution file written by an unsupported format version."""


class NumericalError(BemError, ArithmeticError):
    """Numerical failure (exit code 4)."""


class SolverError(NumericalError):
    """The boundary system is numerically singular."""

    def __init__(self, message, condition_estimate=float("inf")):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ConvergenceError(NumericalError):
    """Adaptive quadrature ran out of subdivision budget."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class DomainError(BemError, ValueError):
    """A point was evaluated outside the region where the formula holds."""

    def __init__(self, message, classification=None):
        super().__init__(message)
        self.classification = classification


class ScenarioError(DomainError):
    """Plate sample points fall outside the annular region."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)
