"""Seeded draws of design angles and detector noise."""

from __future__ import annotations

import numpy as np

from randtomo.core.errors import InvalidArgumentError
from randtomo.models.entities import AngleSet, RngSeed

ANGLE_STREAM = 1
NOISE_STREAM = 2


def _as_generator(rng: RngSeed | np.random.Generator) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return rng.generator()


def sample_angles(n: int, n_theta: int, rng: RngSeed | np.random.Generator) -> AngleSet:
    """Draw ``n`` distinct angle indices out of ``n_theta`` uniformly, sorted ascending."""
    if not 1 <= n <= n_theta:
        raise InvalidArgumentError(f"cannot draw {n} distinct angles out of {n_theta}")
    picked = _as_generator(rng).choice(n_theta, size=n, replace=False)
    return AngleSet(tuple(np.sort(picked).tolist()), n_theta)


def gaussian_noise(length: int, rng: RngSeed | np.random.Generator) -> np.ndarray:
    """Return ``length`` i.i.d. standard normal draws (ziggurat sampler of PCG64)."""
    if length < 1:
        raise InvalidArgumentError(f"noise length must be positive, got {length}")
    return _as_generator(rng).standard_normal(length)


__all__ = ["ANGLE_STREAM", "NOISE_STREAM", "sample_angles", "gaussian_noise"]
