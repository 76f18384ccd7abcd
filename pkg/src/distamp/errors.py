"""Exception hierarchy.

Each error carries an ``exit_code`` used by the command-line front end:
2 for bad input, 3 for capacity limits, 4 for numerical invariant failures.
"""


class DistampError(Exception):
    exit_code = 4


class ConfigError(DistampError):
    exit_code = 2


class DomainError(ConfigError):
    """Input outside the validity domain of an operation."""


class ParamMismatch(ConfigError):
    """Two objects that must share channel parameters do not."""


class PerturbativityViolated(ConfigError):
    """Coupling too strong for the first-order flip probability picture."""


class CapacityExceeded(DistampError):
    exit_code = 3


class TruncationTooSmall(CapacityExceeded):
    """The Fock cutoff leaves more than the allowed tail mass."""


class TruncationOverflow(CapacityExceeded):
    """Evolution pushed population into the top Fock bin."""


class InvariantViolation(DistampError):
    exit_code = 4


class GridTooNarrow(InvariantViolation):
    """The quadrature grid does not hold the wavefunction's support."""


class QuadratureFailure(InvariantViolation):
    pass


class DegenerateOverlap(InvariantViolation):
    pass
