"""Exception hierarchy shared by the model, solver and scenario layers."""


class ModelError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ModelError, ValueError):
    """An argument lies outside the domain of a function (e.g. u(a) with a <= 0)."""


class IntegrityError(ModelError, RuntimeError):
    """A flow exceeded its source compartment during a forward step."""


class ValidationError(ModelError, ValueError):
    """A parameter set, state or scenario violates one of its invariants.

    ``field`` names the offending field (or invariant) when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class InvariantViolation(ModelError, ArithmeticError):
    """A value path broke V_s >= V_i; ``date`` is the first offending day if known."""

    def __init__(self, message, date=None):
        super().__init__(message)
        self.date = date


class ConvergenceError(ModelError, RuntimeError):
    """The equilibrium iteration hit its iteration cap."""

    def __init__(self, message, residual_history=()):
        super().__init__(message)
        self.residual_history = list(residual_history)
