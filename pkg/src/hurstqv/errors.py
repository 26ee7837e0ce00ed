"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the CLI prints as
``error: <code>: <message>``.
"""


class HurstQVError(Exception):
    code = "error"


class DomainError(HurstQVError, ValueError):
    """Argument outside the admissible domain of an operation."""

    code = "domain"


class SynthesisError(HurstQVError):
    """Circulant embedding produced significantly negative eigenvalues."""

    code = "synthesis"


class FactorizationError(HurstQVError):
    code = "factorization"


class SimulationError(HurstQVError):
    """Non-finite state encountered while stepping an SDE."""

    code = "simulation"

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DegeneratePathError(HurstQVError):
    """Window sums vanish, so the log-ratio statistic is undefined."""

    code = "degenerate-path"


class InversionRangeError(HurstQVError):
    """Statistic lies outside the range of the function being inverted."""

    code = "range"

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class NearZeroDiffusionError(HurstQVError):
    code = "near-zero-diffusion"


class NumericError(HurstQVError):
    code = "numeric"
