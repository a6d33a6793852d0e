"""Input validation helpers for arrays fed into the estimators."""

import numpy as np

from .errors import ShapeError


def check_feature_matrix(x, *, num_rows=None, name="features"):
    """Coerce to a finite 2-D float64 C-order array."""
    arr = np.asarray(x, dtype=np.float64, order="C")
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if num_rows is not None and arr.shape[0] != num_rows:
        raise ShapeError(
            f"{name} has {arr.shape[0]} rows, expected {num_rows}"
        )
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_labels(y, *, num_rows=None):
    """Coerce to a 1-D non-negative integer label vector."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ShapeError(f"labels must be 1-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == arr.astype(np.int64)):
            raise ValueError("labels must be integers")
    arr = arr.astype(np.int64)
    if num_rows is not None and arr.shape[0] != num_rows:
        raise ShapeError(f"labels have {arr.shape[0]} rows, expected {num_rows}")
    if arr.size and arr.min() < 0:
        raise ValueError("labels must be non-negative")
    return arr


def check_same_dim(a, b, name_a="a", name_b="b"):
    if a.shape[-1] != b.shape[-1]:
        raise ShapeError(
            f"{name_a} dim {a.shape[-1]} != {name_b} dim {b.shape[-1]}"
        )
