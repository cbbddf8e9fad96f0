"""Inner products used across the package."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from randtomo.core.errors import DimensionError
from randtomo.models.entities import SinogramBlock


def dot(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Euclidean pairing of two equally long vectors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.dot(a, b))


def weighted_residual_norm_sq(residual: SinogramBlock) -> float:
    """Squared norm in the sample-averaged space: mean over angles of the per-angle energy."""
    if residual.n_angles < 1:
        raise DimensionError("empty sinogram block")
    return float(np.dot(residual.data, residual.data)) / residual.n_angles


__all__ = ["dot", "weighted_residual_norm_sq"]
