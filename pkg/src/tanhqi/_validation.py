"""Input checks shared by the estimator and the command line."""
import math

import numpy as np
from sklearn.utils.validation import check_array


def check_positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_points(X, dim=None, name="X"):
    """Return ``X`` as a float array of shape ``(m, dim)``.

    A 1-D array is read as ``m`` points in one dimension.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and (dim is None or dim == 1):
        X = X.reshape(-1, 1)
    X = check_array(X, dtype=float, ensure_2d=True, ensure_all_finite=True)
    if dim is not None and X.shape[1] != dim:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {dim}")
    return X


def check_values(y, n_samples):
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != n_samples:
        raise ValueError(f"got {y.shape[0]} values for {n_samples} points")
    if not np.all(np.isfinite(y)):
        raise ValueError("sample values must be finite")
    return y


def lattice_indices(X, h, tol=1e-8):
    """Integer indices ``j`` with ``X = h j``; raises if a point is off the lattice."""
    t = X / h
    j = np.rint(t)
    off = np.abs(t - j)
    if np.any(off > tol * np.maximum(1.0, np.abs(t))):
        bad = int(np.argmax(off.max(axis=1)))
        raise ValueError(f"sample point {X[bad]} is not on the lattice h*Z^n with h={h}")
    return j.astype(np.int64)
