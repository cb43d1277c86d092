"""Sharp-interface finite-volume solver for multi-material compressible flow.

A single velocity/pressure mixture model with one volume fraction and one
partial mass per material is advanced by a two-stage scheme: an acoustic
Lagrangian step followed by a remap onto the fixed grid. The remap can use
either plain upwind fluxes or an anti-diffusive flux choice that keeps
material interfaces a few cells wide without reconstruction.
"""

from .errors import (
    ClosureFailureError,
    ConfigError,
    EosDomainError,
    HyperbolicityError,
    HypothesisViolationError,
    InternalConsistencyError,
    MultimatError,
    StabilityViolationError,
    StateError,
    TimeStepError,
    VacuumError,
)
from .eos import (
    PerfectGas,
    StiffenedGas,
    TabulatedMieGruneisen,
    VanDerWaals,
    eos_from_dict,
    mixture_pressure,
    mixture_sound_speed_sq,
)

__version__ = "0.1.0"
