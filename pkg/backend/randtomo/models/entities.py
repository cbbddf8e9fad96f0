"""Immutable value types shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from randtomo.core.errors import DimensionError, InvalidArgumentError


def _frozen_array(values: Sequence[float] | np.ndarray, dtype: type = np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).ravel()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, slots=True)
class Image:
    """Square image stored as a flat row-major vector of length ``side**2``."""

    data: np.ndarray
    side: int

    def __post_init__(self) -> None:
        if self.side < 1:
            raise InvalidArgumentError(f"side must be positive, got {self.side}")
        arr = _frozen_array(self.data)
        if arr.size != self.side * self.side:
            raise DimensionError(
                f"image of side {self.side} needs {self.side**2} values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("image contains non-finite values")
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, side: int) -> "Image":
        return cls(np.zeros(side * side), side)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Image":
        array = np.asarray(array, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionError(f"expected a square 2-D array, got shape {array.shape}")
        return cls(array.ravel(), array.shape[0])

    @property
    def array(self) -> np.ndarray:
        return self.data.reshape(self.side, self.side)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


@dataclass(frozen=True, slots=True)
class SinogramBlock:
    """Detector readings for ``n_angles`` angles, stored angle-major."""

    data: np.ndarray
    n_angles: int
    n_dtc: int

    def __post_init__(self) -> None:
        if self.n_angles < 1 or self.n_dtc < 1:
            raise DimensionError(
                f"sinogram needs at least one angle and detector, got {self.n_angles}x{self.n_dtc}"
            )
        arr = _frozen_array(self.data)
        if arr.size != self.n_angles * self.n_dtc:
            raise DimensionError(
                f"sinogram {self.n_angles}x{self.n_dtc} needs {self.n_angles * self.n_dtc} values, "
                f"got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("sinogram contains non-finite values")
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "SinogramBlock":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        return cls(matrix.ravel(), matrix.shape[0], matrix.shape[1])

    @property
    def matrix(self) -> np.ndarray:
        return self.data.reshape(self.n_angles, self.n_dtc)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.data)))


@dataclass(frozen=True, slots=True)
class AngleSet:
    """Distinct indices into a fine grid of ``n_theta`` angles."""

    indices: tuple[int, ...]
    n_theta: int

    def __post_init__(self) -> None:
        indices = tuple(int(i) for i in self.indices)
        if not 1 <= len(indices) <= self.n_theta:
            raise InvalidArgumentError(
                f"angle set size must lie in [1, {self.n_theta}], got {len(indices)}"
            )
        if len(set(indices)) != len(indices):
            raise InvalidArgumentError("angle indices must be pairwise distinct")
        if min(indices) < 0 or max(indices) >= self.n_theta:
            raise InvalidArgumentError(f"angle indices must lie in [0, {self.n_theta})")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def full(cls, n_theta: int) -> "AngleSet":
        return cls(tuple(range(n_theta)), n_theta)

    def __len__(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


@dataclass(frozen=True, slots=True)
class RngSeed:
    """Seed plus stream id; ``spawn`` refines the stream for per-task draws."""

    seed: int
    stream_id: int = 0
    spawn: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream_id < 0 or any(key < 0 for key in self.spawn):
            raise InvalidArgumentError("stream id and spawn keys must be nonnegative")

    def derive(self, *keys: int) -> "RngSeed":
        return RngSeed(self.seed, self.stream_id, self.spawn + tuple(int(k) for k in keys))

    def with_stream(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.seed, stream_id, self.spawn)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.spawn))
        return np.random.Generator(np.random.PCG64(sequence))


__all__ = ["Image", "SinogramBlock", "AngleSet", "RngSeed"]
