"""Input validation helpers shared by the function API and the estimators."""

from __future__ import annotations

import numpy as np

from .model import SensingMatrix


def check_matrix(F) -> np.ndarray:
    """Coerce a SensingMatrix or array-like into a finite 2-d float array."""
    if isinstance(F, SensingMatrix):
        return F.entries
    a = np.asarray(F, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must be nonempty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def check_vector(y, length: int | None = None, name: str = "y") -> np.ndarray:
    """Coerce to a finite 1-d float array, optionally of a fixed length."""
    v = np.asarray(y, dtype=float).ravel() if np.ndim(y) != 1 else np.asarray(y, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-d")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} entries must be finite")
    if length is not None and v.size != length:
        raise ValueError(f"{name} has length {v.size}, expected {length}")
    return v


def check_matrix_vector(F, y) -> tuple[np.ndarray, np.ndarray]:
    a = check_matrix(F)
    v = check_vector(y, length=a.shape[0])
    return a, v
