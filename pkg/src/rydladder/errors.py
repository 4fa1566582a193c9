"""Exception types shared across the package."""


class RydladderError(Exception):
    """Base class for all package errors."""


class ParameterError(RydladderError):
    """A physical or configuration parameter is outside its domain."""


class DimensionMismatchError(RydladderError):
    """A state vector or table does not match the system size."""


class SolverError(RydladderError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateGroundStateError(SolverError):
    """The two lowest eigenvalues are numerically indistinguishable.

    Raised instead of silently picking one of the degenerate states; both
    eigenvalues are reported so the caller can decide what to do.
    """

    def __init__(self, e0, e1):
        super().__init__(
            f"ground state is degenerate: E0={e0!r}, E1={e1!r} "
            f"(gap {abs(e1 - e0):.3e} < 1e-8)"
        )
        self.e0 = e0
        self.e1 = e1


class EmptyDistributionError(RydladderError):
    """An operation produced or received a distribution with no entries."""


class FitError(RydladderError):
    """A least-squares fit could not be performed or did not converge."""


class DataFormatError(RydladderError):
    """An input file does not have the expected layout."""
