"""Exception and warning types raised across the package."""


class SubspaceClusteringError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(SubspaceClusteringError, ValueError):
    """Input matrix has non-finite entries or the wrong shape."""


class EmptyInput(SubspaceClusteringError, ValueError):
    pass


class DimensionMismatch(SubspaceClusteringError, ValueError):
    pass


class DegenerateBasis(SubspaceClusteringError, ValueError):
    """A direction basis is rank deficient at the working tolerance."""


class InvalidSpec(SubspaceClusteringError, ValueError):
    pass


class InvalidParameter(SubspaceClusteringError, ValueError):
    pass


class InfeasibleConstraint(SubspaceClusteringError, ValueError):
    """No admissible self-representation exists for some column."""

    def __init__(self, column, residual=None):
        self.column = column
        self.residual = residual
        msg = f"column {column} cannot be represented by the other points"
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        super().__init__(msg)


class ParseError(SubspaceClusteringError, ValueError):
    """Malformed dataset file; ``row`` is 1-based over data rows."""

    def __init__(self, message, row=None, cell=None):
        self.row = row
        self.cell = cell
        super().__init__(message)


class DegenerateDataWarning(UserWarning):
    pass


class ZeroColumnWarning(UserWarning):
    pass


class DisconnectedAffinityWarning(UserWarning):
    pass
