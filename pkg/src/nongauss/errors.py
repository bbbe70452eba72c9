"""Exception types shared across the package.

Errors fall into two families: configuration problems (bad input that a
caller can fix before running anything) and numerical-contract failures
(a computation that started but could not meet its stated tolerance or
physicality guarantees).  The CLI maps the first family to exit code 2
and the second to exit code 3.
"""


class NongaussError(Exception):
    """Base class for all package errors."""


class ConfigError(NongaussError):
    """Run configuration is inconsistent or incomplete."""


class UnknownPreset(ConfigError):
    """Requested figure preset id does not exist."""


class InvalidParameter(NongaussError):
    """A physical parameter is outside its admissible range."""


class ResonanceSingularity(NongaussError):
    """Modulation frequency too close to mechanical resonance for the
    off-resonant closed form; use the resonant closed form instead."""


class QuadratureFailure(NongaussError):
    """Adaptive integration could not meet the requested tolerance
    within the evaluation budget."""


class InvariantViolation(NongaussError):
    """Internally inconsistent data (e.g. a covariance diagonal with a
    non-negligible imaginary part)."""


class NonPhysicalState(NongaussError):
    """A symplectic eigenvalue fell below 1 beyond numerical tolerance,
    violating the uncertainty principle."""


class DomainError(NongaussError):
    """Argument outside the mathematical domain of a special function."""


class TruncationTooSmall(NongaussError):
    """Fock-space cutoff discards too much population.

    The measured leaked population is carried in :attr:`leak`.
    """

    def __init__(self, message, leak=None):
        super().__init__(message)
        self.leak = leak


class StepSizeTooLarge(NongaussError):
    """Halving the integrator step changed a reported observable by more
    than the configured tolerance."""
