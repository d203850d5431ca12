"""Exceptions raised by Wavelock.

All exceptions derive from a built-in exception so callers that only know
about `ValueError` or `LinAlgError` keep working. The CLI maps them onto exit
codes through `EXIT_CODES`.

"""


__all__ = [
    "AttenuationDomainError",
    "ConfigError",
    "DegenerateGeometryError",
    "NumericalFailureError",
    "SingularModelError",
]


import numpy as np


EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class ConfigError(ValueError):
    """An invalid scenario, signal or optimizer configuration."""


class DegenerateGeometryError(ValueError):
    """A source coincides with a sensor (zero source-sensor distance)."""


class AttenuationDomainError(ValueError):
    """An attenuation model was evaluated at a non-positive distance."""


class SingularModelError(np.linalg.LinAlgError):
    """The steering matrix of a frequency bin lost full column rank.

    Attributes
    ----------
    bin_index : int or None
        The frequency bin (DFT index) at which the rank deficiency occurred.

    """

    def __init__(self, msg, bin_index=None):
        super().__init__(msg)
        self.bin_index = bin_index


class NumericalFailureError(ArithmeticError):
    """An optimizer or linear solve could not continue."""


EXIT_CODES = (
    (ConfigError, EXIT_CONFIG_ERROR),
    (DegenerateGeometryError, EXIT_CONFIG_ERROR),
    (SingularModelError, EXIT_NUMERICAL_FAILURE),
    (NumericalFailureError, EXIT_NUMERICAL_FAILURE),
    (AttenuationDomainError, EXIT_CONFIG_ERROR),
)


def exit_code_for(error):
    """Return the CLI exit code associated with an exception instance."""
    for error_type, code in EXIT_CODES:
        if isinstance(error, error_type):
            return code
    if isinstance(error, (ValueError, TypeError, KeyError, OSError)):
        return EXIT_CONFIG_ERROR
    return EXIT_NUMERICAL_FAILURE
