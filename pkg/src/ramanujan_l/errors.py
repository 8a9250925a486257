"""Exception types shared across modules."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed the configured memory/term budget."""


class QuadratureEvalError(ArithmeticError):
    """The integrand failed (exception, NaN or overflow) at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DiscoveryError(RuntimeError):
    """A required linear dependency could not be established."""
