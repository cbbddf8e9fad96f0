"""Weighted p-homogeneous penalty R(f) = (1/p) sum_λ w_λ |(W f)_λ|^p and its companions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.models.entities import Image
from randtomo.operators.wavelet import AnalysisTransform
from randtomo.regularization.prox import check_exponent, prox_power, signed_power


def dyadic_weights(r: float, s: float, d: int, levels: np.ndarray) -> np.ndarray:
    exponent = d * (r * (s / d + 0.5) - 1.0)
    return 2.0 ** (np.asarray(levels, dtype=np.float64) * exponent)


def besov_weights(p: float, s: float, d: int, levels: np.ndarray) -> np.ndarray:
    """Per-coefficient weights ``2**(|λ| d (p (s/d + 1/2) - 1))`` of the Besov B^s_{p,p} norm."""
    check_exponent(p)
    if d < 1:
        raise InvalidArgumentError(f"dimension d must be >= 1, got {d}")
    return dyadic_weights(p, s, d, levels)


def critical_smoothness(p: float, d: int = 2) -> float:
    """Smoothness at which the Besov weights collapse to one."""
    return d * (1.0 / p - 0.5)


@dataclass(frozen=True, slots=True)
class Subgradient:
    """The unique element Wᵀ(w ⊙ (W f)^[p-1]) of ∂R(f)."""

    data: np.ndarray
    side: int

    @property
    def image(self) -> Image:
        return Image(self.data, self.side)


@dataclass(frozen=True)
class Penalty:
    p: float
    transform: AnalysisTransform
    weights: np.ndarray | None = field(default=None)
    smoothness: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", check_exponent(self.p))
        size = self.transform.size
        if self.weights is None:
            weights = np.ones(size)
        else:
            weights = np.array(self.weights, dtype=np.float64, copy=True).ravel()
        if weights.size != size:
            raise DimensionError(f"expected {size} weights, got {weights.size}")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            raise InvalidArgumentError("penalty weights must be strictly positive and finite")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @classmethod
    def besov(
        cls, p: float, side: int, s: float | None = None, levels: int | None = None
    ) -> "Penalty":
        """Haar penalty with Besov weights; ``s`` defaults to the critical d(1/p - 1/2)."""
        transform = AnalysisTransform.haar(side, levels)
        smoothness = critical_smoothness(p) if s is None else float(s)
        weights = besov_weights(p, smoothness, 2, transform.coefficient_levels())
        return cls(p, transform, weights, smoothness)

    @classmethod
    def tikhonov(cls, side: int) -> "Penalty":
        return cls(2.0, AnalysisTransform.identity(side))

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def side(self) -> int:
        return self.transform.side

    def _coefficients(self, f: Image | np.ndarray) -> np.ndarray:
        if isinstance(f, Image) and f.side != self.side:
            raise DimensionError(f"image side {f.side} does not match penalty side {self.side}")
        return self.transform.analysis(f)

    def eval_R(self, f: Image | np.ndarray) -> float:
        c = self._coefficients(f)
        return float(np.sum(self.weights * np.abs(c) ** self.p) / self.p)

    def eval_R_star(self, g: Image | np.ndarray) -> float:
        c = self._coefficients(g)
        q = self.q
        return float(np.sum(self.weights ** (1.0 - q) * np.abs(c) ** q) / q)

    def subgradient(self, f: Image | np.ndarray) -> Subgradient:
        c = self._coefficients(f)
        data = self.transform.synthesis_array(self.weights * signed_power(c, self.p - 1.0))
        return Subgradient(data, self.side)

    def inverse_subgradient(self, r: np.ndarray) -> Image:
        """Image f with subgradient(f) = r, i.e. Wᵀ((W r / w)^[1/(p-1)])."""
        c = self.transform.analysis(np.asarray(r, dtype=np.float64)) / self.weights
        return self.transform.synthesis(signed_power(c, 1.0 / (self.p - 1.0)))

    def bregman(self, f: Image, g: Image) -> float:
        """Symmetric Bregman distance ⟨r_f - r_g, f - g⟩."""
        rf = self.subgradient(f).data
        rg = self.subgradient(g).data
        return float(np.dot(rf - rg, f.data - g.data))

    def fenchel_young_gap(self, f: Image, g: Image | np.ndarray) -> float:
        """R(f) + R*(g) - ⟨g, f⟩, nonnegative with equality iff g = subgradient(f)."""
        g_data = g.data if isinstance(g, Image) else np.asarray(g, dtype=np.float64).ravel()
        return self.eval_R(f) + self.eval_R_star(g_data) - float(np.dot(g_data, f.data))

    def prox(self, x: np.ndarray, scale: float) -> np.ndarray:
        """prox of ``scale * R`` in coefficient space; the weights scale it per component."""
        if scale <= 0:
            raise InvalidArgumentError(f"prox scale must be positive, got {scale}")
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1:] != (self.transform.size,):
            raise DimensionError(
                f"expected {self.transform.size} coefficients, got shape {x.shape}"
            )
        return prox_power(x, scale * self.weights, self.p)


def eval_R(pen: Penalty, f: Image) -> float:
    return pen.eval_R(f)


def eval_R_star(pen: Penalty, g: Image | np.ndarray) -> float:
    return pen.eval_R_star(g)


def subgradient(pen: Penalty, f: Image) -> Subgradient:
    return pen.subgradient(f)


def bregman(pen: Penalty, f: Image, g: Image) -> float:
    return pen.bregman(f, g)


def prox(pen: Penalty, x: np.ndarray, scale: float) -> np.ndarray:
    return pen.prox(x, scale)


__all__ = [
    "Penalty",
    "Subgradient",
    "besov_weights",
    "bregman",
    "critical_smoothness",
    "dyadic_weights",
    "eval_R",
    "eval_R_star",
    "prox",
    "signed_power",
    "subgradient",
]
