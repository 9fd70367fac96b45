"""Exception hierarchy shared across the package.

Each error class carries the process exit code used by the CLI.
"""


class Z2LadderError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParameterError(Z2LadderError, ValueError):
    """Invalid physical or configuration parameter."""

    exit_code = 2


class ConfigError(ParameterError):
    """Malformed experiment configuration (bad key, bad value, bad schema)."""

    exit_code = 2


class NumericalError(Z2LadderError):
    """Numerical procedure failed to meet its tolerance.

    Carries a ``diagnostics`` dict (step sizes, iteration counts, residuals)
    to make integrator and eigensolver failures actionable.
    """

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class StructureError(NumericalError):
    """A spectrum does not have the level structure an extraction relies on.

    Raised e.g. when the odd-sector quadruplet does not split 1-2-1, which
    typically flags proximity to the spinon-condensation boundary.
    """


class CapacityError(Z2LadderError):
    """Requested problem exceeds a configured size limit."""

    exit_code = 4
