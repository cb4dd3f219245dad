"""Small input-validation helpers, in the spirit of ``sklearn.utils.validation``."""

import math
import numbers

import numpy as np

from .exceptions import ConfigurationError, DomainError


def check_scalar_positive(value, name, *, error=DomainError):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise error(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise error(f"{name} must be positive and finite, got {value!r}")
    return value


def check_positive_int(value, name, *, minimum=1, error=ConfigurationError):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise error(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise error(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_finite_real(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_unit_interval(u, name="u"):
    """Return ``u`` as float array, raising if any entry is outside [-1, 1]."""
    arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(arr)) or np.any(np.abs(arr) > 1.0):
        raise DomainError(f"{name} must lie in [-1, 1]")
    return arr


def check_square_symmetric(M, tol=1e-12, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.T)) > tol * scale:
        raise DomainError(f"{name} is not symmetric")
    return M
