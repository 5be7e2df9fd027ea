"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class UnsupportedDerivativeError(ValueError):
    """Symbolic differentiation hit a non-differentiable node (``step``)."""


class InconsistentDataError(ValueError):
    """Classical boundary data violates the corner agreement conditions.

    The full :class:`~pseudoparabolic.boundary.AgreementReport` is kept on
    ``report`` so callers can show which conditions failed.
    """

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class ConvergenceError(RuntimeError):
    """Picard iteration did not reach the requested tolerance."""

    def __init__(self, message, iterations, residual):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SingularMarchError(RuntimeError):
    """A marching pivot ``1 + s`` fell below the configured floor."""

    def __init__(self, message, node, pivot):
        super().__init__(message)
        self.node = node
        self.pivot = pivot
