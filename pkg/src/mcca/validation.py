"""Input validation helpers used across the package.

All helpers return float64 C-contiguous arrays so downstream linear algebra
is deterministic, and raise :class:`~mcca.errors.DataError` (bad values) or
:class:`~mcca.errors.ConfigError` (bad options) with messages that name the
offending argument.
"""

import numpy as np

from .errors import ConfigError, DataError


def check_matrix(a, name="matrix", allow_empty=False):
    """Coerce ``a`` to a finite 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DataError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise DataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise DataError(f"{name} has a non-finite entry at ({bad[0]}, {bad[1]})")
    return np.ascontiguousarray(arr)


def check_vector(v, name="vector", length=None):
    """Coerce ``v`` to a finite 1-D float64 array, optionally of fixed length."""
    arr = np.asarray(v, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} has a non-finite entry")
    if length is not None and arr.shape[0] != length:
        raise DataError(f"{name} must have length {length}, got {arr.shape[0]}")
    return arr


def check_square(a, name="matrix"):
    arr = check_matrix(a, name=name)
    if arr.shape[0] != arr.shape[1]:
        raise DataError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_symmetric(a, name="matrix", tol=1e-10):
    """Validate near-symmetry and return the exactly symmetrized matrix."""
    arr = check_square(a, name=name)
    scale = max(1.0, float(np.abs(arr).max()))
    asym = float(np.abs(arr - arr.T).max())
    if asym > tol * scale:
        raise DataError(f"{name} is not symmetric (max asymmetry {asym:.3e})")
    return (arr + arr.T) / 2.0


def check_positive_int(value, name, minimum=1):
    try:
        ivalue = int(value)
        fvalue = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if ivalue != fvalue or ivalue < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return ivalue


def check_nonnegative(value, name):
    fvalue = float(value)
    if not np.isfinite(fvalue) or fvalue < 0:
        raise ConfigError(f"{name} must be a finite nonnegative number, got {value!r}")
    return fvalue


def check_weights(w, n, name="weights"):
    """Validate a length-``n`` vector of finite nonnegative weights."""
    arr = check_vector(w, name=name, length=n)
    if np.any(arr < 0):
        raise DataError(f"{name} must be nonnegative")
    return arr
