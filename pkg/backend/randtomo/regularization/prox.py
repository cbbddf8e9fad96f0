"""Componentwise proximal map of the weighted p-th power penalty.

For each component the nonnegative magnitude ``z`` solves ``z + s * z**(p - 1) = |x|`` and the
result carries the sign of ``x``. Closed forms exist for p in {2, 3/2, 4/3}; other exponents use
a bracketed Newton iteration.
"""

from __future__ import annotations

import numpy as np

from randtomo.core.errors import InvalidArgumentError

TINY = 1e-300
_NEWTON_MAX_ITERS = 200
_STEP_TOL = 4.0 * np.finfo(np.float64).eps


def check_exponent(p: float) -> float:
    p = float(p)
    if not 1.0 < p <= 2.0:
        raise InvalidArgumentError(f"p must lie in (1, 2], got {p}")
    return p


def signed_power(x: np.ndarray | float, n: float) -> np.ndarray:
    """Componentwise ``sign(x) * |x|**n``."""
    if n <= 0:
        raise InvalidArgumentError(f"signed power exponent must be positive, got {n}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.abs(x) ** n


def _residual(z: np.ndarray, magnitude: np.ndarray, scale: np.ndarray, p: float) -> np.ndarray:
    return z + scale * z ** (p - 1.0) - magnitude


def _newton_polish(z: np.ndarray, magnitude: np.ndarray, scale: np.ndarray, p: float) -> np.ndarray:
    positive = z > 0.0
    if not np.any(positive):
        return z
    zp, ap, sp = z[positive], magnitude[positive], scale[positive]
    slope = 1.0 + sp * (p - 1.0) * zp ** (p - 2.0)
    polished = zp - _residual(zp, ap, sp, p) / slope
    out = z.copy()
    out[positive] = np.clip(polished, 0.0, ap)
    return out


def _newton_bracketed(magnitude: np.ndarray, scale: np.ndarray, p: float) -> np.ndarray:
    z = magnitude.copy()
    lo = np.zeros_like(magnitude)
    hi = magnitude.copy()
    for _ in range(_NEWTON_MAX_ITERS):
        phi = _residual(z, magnitude, scale, p)
        lo = np.where(phi < 0.0, z, lo)
        hi = np.where(phi > 0.0, z, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = 1.0 + scale * (p - 1.0) * z ** (p - 2.0)
            step = np.where(np.isfinite(slope), phi / slope, 0.0)
        candidate = z - step
        outside = ~((candidate > lo) & (candidate < hi)) | ~np.isfinite(slope)
        candidate = np.where(outside, 0.5 * (lo + hi), candidate)
        moved = np.abs(candidate - z)
        z = candidate
        if np.all(moved <= _STEP_TOL * np.maximum(1.0, magnitude)):
            break
    return z


def prox_power(x: np.ndarray, scale: np.ndarray | float, p: float) -> np.ndarray:
    """Minimizer of ``0.5 * (z - x)**2 + (scale / p) * |z|**p`` for every component."""
    p = check_exponent(p)
    x = np.asarray(x, dtype=np.float64)
    scale = np.broadcast_to(np.asarray(scale, dtype=np.float64), x.shape)
    if np.any(~(scale > 0.0)):
        raise InvalidArgumentError("prox scale must be strictly positive")

    magnitude = np.abs(x)
    out = np.zeros_like(x)
    active = magnitude > TINY
    if not np.any(active):
        return out
    a, s = magnitude[active], scale[active]

    if p == 2.0:
        z = a / (1.0 + s)
    elif np.isclose(p, 1.5, rtol=0.0, atol=1e-15):
        root = 2.0 * a / (s + np.sqrt(s * s + 4.0 * a))
        z = _newton_polish(root * root, a, s, 1.5)
    elif np.isclose(p, 4.0 / 3.0, rtol=0.0, atol=1e-15):
        u = np.cbrt(a / 2.0 + np.sqrt(a * a / 4.0 + s**3 / 27.0))
        v = s / (3.0 * u)
        root = a / (u * u + s / 3.0 + v * v)
        z = _newton_polish(root**3, a, s, 4.0 / 3.0)
    else:
        z = _newton_bracketed(a, s, p)

    out[active] = np.sign(x[active]) * z
    return out


__all__ = ["TINY", "check_exponent", "prox_power", "signed_power"]
