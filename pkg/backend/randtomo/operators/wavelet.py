"""Orthonormal analysis transforms: identity and the 2-D Haar wavelet.

Haar coefficients use the Mallat layout: after ``levels`` steps the top-left block of size
``side >> levels`` holds the scaling coefficients and the detail bands of dyadic level ``j``
occupy the ring ``2**j <= max(row, col) < 2**(j + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.models.entities import Image

_SQRT_HALF = math.sqrt(0.5)


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def _haar_step(block: np.ndarray) -> np.ndarray:
    lo = (block[..., :, 0::2] + block[..., :, 1::2]) * _SQRT_HALF
    hi = (block[..., :, 0::2] - block[..., :, 1::2]) * _SQRT_HALF
    rows = np.concatenate([lo, hi], axis=-1)
    lo = (rows[..., 0::2, :] + rows[..., 1::2, :]) * _SQRT_HALF
    hi = (rows[..., 0::2, :] - rows[..., 1::2, :]) * _SQRT_HALF
    return np.concatenate([lo, hi], axis=-2)


def _haar_step_inverse(block: np.ndarray) -> np.ndarray:
    half = block.shape[-1] // 2
    rows = np.empty_like(block)
    lo, hi = block[..., :half, :], block[..., half:, :]
    rows[..., 0::2, :] = (lo + hi) * _SQRT_HALF
    rows[..., 1::2, :] = (lo - hi) * _SQRT_HALF
    out = np.empty_like(block)
    lo, hi = rows[..., :, :half], rows[..., :, half:]
    out[..., :, 0::2] = (lo + hi) * _SQRT_HALF
    out[..., :, 1::2] = (lo - hi) * _SQRT_HALF
    return out


@dataclass(frozen=True, slots=True)
class AnalysisTransform:
    """Orthogonal matrix W acting on flat images of a fixed side."""

    kind: Literal["identity", "haar2d"]
    side: int
    levels: int = 0

    def __post_init__(self) -> None:
        if self.side < 1:
            raise InvalidArgumentError(f"side must be positive, got {self.side}")
        if self.kind == "identity":
            object.__setattr__(self, "levels", 0)
            return
        if self.kind != "haar2d":
            raise InvalidArgumentError(f"unknown transform kind {self.kind!r}")
        if not _is_power_of_two(self.side) or self.side < 2:
            raise InvalidArgumentError(
                f"haar2d needs a power-of-two side >= 2, got {self.side}; resample the image "
                "instead of padding it"
            )
        depth = int(math.log2(self.side))
        if not 1 <= self.levels <= depth:
            raise InvalidArgumentError(f"haar2d levels must lie in [1, {depth}], got {self.levels}")

    @classmethod
    def identity(cls, side: int) -> "AnalysisTransform":
        return cls("identity", side, 0)

    @classmethod
    def haar(cls, side: int, levels: int | None = None) -> "AnalysisTransform":
        if not _is_power_of_two(side) or side < 2:
            raise InvalidArgumentError(f"haar2d needs a power-of-two side >= 2, got {side}")
        depth = int(math.log2(side))
        return cls("haar2d", side, depth if levels is None else levels)

    @property
    def size(self) -> int:
        return self.side * self.side

    def analysis(self, f: Image | np.ndarray) -> np.ndarray:
        """Coefficients W f; accepts an Image or a batch of flat images of shape (..., side**2)."""
        flat = self._flat(f.data if isinstance(f, Image) else f)
        if self.kind == "identity":
            return flat.copy()
        coeffs = flat.reshape(flat.shape[:-1] + (self.side, self.side)).copy()
        n = self.side
        for _ in range(self.levels):
            coeffs[..., :n, :n] = _haar_step(coeffs[..., :n, :n])
            n //= 2
        return coeffs.reshape(flat.shape)

    def synthesis_array(self, c: np.ndarray) -> np.ndarray:
        """Wᵀ c on flat coefficient vectors of shape (..., side**2)."""
        flat = self._flat(c)
        if self.kind == "identity":
            return flat.copy()
        image = flat.reshape(flat.shape[:-1] + (self.side, self.side)).copy()
        n = self.side >> (self.levels - 1)
        for _ in range(self.levels):
            image[..., :n, :n] = _haar_step_inverse(image[..., :n, :n])
            n *= 2
        return image.reshape(flat.shape)

    def synthesis(self, c: np.ndarray) -> Image:
        """Exact inverse of :meth:`analysis` for a single coefficient vector."""
        c = np.asarray(c, dtype=np.float64)
        if c.ndim != 1:
            raise DimensionError("synthesis expects a single flat coefficient vector")
        return Image(self.synthesis_array(c), self.side)

    def coefficient_levels(self) -> np.ndarray:
        """Dyadic level |λ| of every coefficient in Mallat order (zeros for identity)."""
        if self.kind == "identity":
            return np.zeros(self.size, dtype=np.int64)
        depth = int(math.log2(self.side))
        coarse = self.side >> self.levels
        idx = np.arange(self.side)
        extent = np.maximum.outer(idx, idx)
        with np.errstate(divide="ignore"):
            detail = np.floor(np.log2(np.maximum(extent, 1))).astype(np.int64)
        levels = np.where(extent < coarse, depth - self.levels, detail)
        return levels.ravel()

    def _flat(self, values: np.ndarray) -> np.ndarray:
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[-1:] != (self.size,):
            raise DimensionError(
                f"expected trailing length {self.size} for side {self.side}, got shape {arr.shape}"
            )
        return arr


def analysis(t: AnalysisTransform, f: Image) -> np.ndarray:
    if f.side != t.side:
        raise DimensionError(f"image side {f.side} does not match transform side {t.side}")
    return t.analysis(f)


def synthesis(t: AnalysisTransform, c: np.ndarray) -> Image:
    return t.synthesis(c)


__all__ = ["AnalysisTransform", "analysis", "synthesis"]
