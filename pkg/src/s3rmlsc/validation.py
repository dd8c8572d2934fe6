"""Small input-validation helpers shared by the numerical modules."""

import numpy as np


def as_float_matrix(a, name="array"):
    """Coerce to a finite 2-D float64 array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def as_float_image(a, name="image"):
    """Coerce to a finite 2-D float64 image array."""
    return as_float_matrix(a, name)


def check_square(a, name="matrix"):
    a = as_float_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def check_symmetric(a, name="matrix", tol=1e-8):
    """Require symmetry up to `tol` relative to the matrix scale."""
    a = check_square(a, name)
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    if a.size and float(np.abs(a - a.T).max()) > tol * scale:
        raise ValueError(f"{name} is not symmetric within tolerance {tol}")
    return a


def check_unit_interval(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_positive(value, name):
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_positive_int(value, name):
    ivalue = int(value)
    if ivalue != value or ivalue < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return ivalue
