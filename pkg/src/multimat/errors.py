"""Exception types shared across the solver."""


class MultimatError(Exception):
    """Base class for all solver errors."""


class EosDomainError(MultimatError):
    """A thermodynamic evaluation left the validity domain of the EOS."""


class HypothesisViolationError(MultimatError):
    """A thermodynamic hypothesis the model relies on (xi > 0) failed."""


class ClosureFailureError(MultimatError):
    """The mixture pressure equation could not be solved.

    Carries the last bracket and residual to help diagnose bad states.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class HyperbolicityError(MultimatError):
    """The mixture sound speed squared was non-positive in some cell."""


class StateError(MultimatError):
    """A cell state violated a structural invariant (e.g. e < 0)."""


class StabilityViolationError(MultimatError):
    """A color function left [0,1] (or its sum left 1) beyond round-off."""


class InternalConsistencyError(MultimatError):
    """An interval that theory guarantees non-empty came out empty.

    Indicates a bug in a bound formula, never a bad input.
    """


class TimeStepError(MultimatError):
    """The Lagrangian volume factor collapsed (L_i <= 0)."""


class ConfigError(MultimatError):
    """Invalid simulation configuration."""


class VacuumError(MultimatError):
    """The exact Riemann solver detected vacuum formation."""
