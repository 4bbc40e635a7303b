"""Exception types shared across the toolkit."""


class SingularResolventError(ArithmeticError):
    """Linear solve for (z - A)x = v failed the residual check."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PairingError(ValueError):
    """Annihilation conditions do not determine a one-dimensional kernel."""


class ConventionMismatchError(RuntimeError):
    """A boundary state failed its eigenstate residual check.

    Signals an internal sign inconsistency in the operator construction;
    nothing downstream can be trusted, so construction aborts.
    """


class DegenerateOverlapError(ArithmeticError):
    """A normalizing inner product is too close to zero to divide by."""


class KernelPoleError(ValueError):
    """The ladder-kernel rational function was evaluated at a pole."""

    def __init__(self, message, h=None):
        super().__init__(message)
        self.h = h


class NoGrowthExponentError(RuntimeError):
    """No admissible real solution of the growth-exponent condition."""


class InsufficientWindowError(ValueError):
    """Integration window too short for the requested quadrature accuracy."""
