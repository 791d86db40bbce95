"""Input validation helpers.

scikit-learn's ``check_array`` rejects complex input, so precoders and
steering matrices are validated here instead.
"""

import numbers

import numpy as np


def check_complex_matrix(X, name="X", shape=None, ndim=2):
    """Return ``X`` as a finite complex ndarray, optionally checking its shape.

    Parameters
    ----------
    X : array_like
        Input data.
    name : str
        Name used in error messages.
    shape : tuple of (int or None), optional
        Expected shape; ``None`` entries are not checked.
    ndim : int
        Required number of dimensions.
    """
    arr = np.asarray(X)
    if arr.dtype.kind not in "biufc":
        raise TypeError(f"{name} must be numeric, got dtype {arr.dtype}")
    arr = arr.astype(complex, copy=False)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if shape is not None:
        for axis, (got, want) in enumerate(zip(arr.shape, shape)):
            if want is not None and got != want:
                raise ValueError(
                    f"{name} has {got} entries along axis {axis}, expected {want}"
                )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def check_real_vector(x, name="x", size=None, nonnegative=False):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if size is not None and arr.size != size:
        raise ValueError(f"{name} has {arr.size} entries, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    if nonnegative and np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def check_positive(value, name, strict=True):
    """Validate a real scalar that must be positive (or nonnegative)."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_space_angle(value, name="space angle"):
    value = float(value)
    if not -1.0 <= value < 1.0:
        raise ValueError(f"{name} must lie in [-1, 1), got {value}")
    return value
