"""Exception hierarchy shared by every module."""

import numpy as np


class GRFError(Exception):
    """Base class for all errors raised by grfields."""


class DomainError(GRFError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(GRFError, ValueError):
    """Inconsistent or unsupported combination of settings."""


class ModelValidationError(DomainError):
    """Model parameters violate a positive-definiteness or normalization rule.

    ``index`` names the offending coefficient, when there is one.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ModelFormatError(ConfigurationError):
    """A serialized model document is structurally malformed."""


class AccuracyError(GRFError, ArithmeticError):
    """A series or quadrature failed to reach its accuracy target."""


class FactorizationError(GRFError, np.linalg.LinAlgError):
    """Cholesky factorization hit a nonpositive pivot.

    ``pivot`` is the index (in the factored ordering) where it failed.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot
