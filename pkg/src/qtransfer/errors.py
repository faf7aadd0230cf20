"""Exception hierarchy shared by all qtransfer modules."""


class QTransferError(Exception):
    """Base class for all library errors."""


class InvalidParametersError(QTransferError, ValueError):
    """Scenario parameters violate a validity constraint."""


class InvalidInputError(QTransferError, ValueError):
    """Malformed user input (tabulated data, config file, CLI argument)."""


class InvalidGridError(QTransferError, ValueError):
    """Time grid violates the integrator's step bound or ordering rules."""


class InvalidSetupError(QTransferError, ValueError):
    """Application setup mixes scenario kinds or is otherwise inconsistent."""


class UndefinedEfficiencyError(QTransferError, ValueError):
    """Efficiency formula is 0/0 for the given rates (all channels closed)."""


class NumericFailureError(QTransferError, RuntimeError):
    """Quadrature or integration failed to converge; message carries diagnostics."""


class InfeasibleMatchingError(QTransferError, ValueError):
    """No non-negative value of the free parameter satisfies the matching condition.

    The missing amount (in rate units) is stored in ``deficit``.
    """

    def __init__(self, message: str, deficit: float = 0.0):
        super().__init__(message)
        self.deficit = float(deficit)
