"""Matrix-free parallel-beam Radon transform on a fine angle grid over [0, pi).

Each unit pixel is projected onto the detector axis as a trapezoid of unit area and the area
falling into each detector bin of width one becomes the matrix entry. Every pixel therefore
splits its mass exactly across at most three neighbouring bins, and the backprojection reuses
the same weights so the pair is an exact transpose.

Geometry: pixel ``(row, col)`` sits at ``x = col - (side - 1) / 2`` and
``y = row - (side - 1) / 2``; angle ``k`` is ``pi * k / n_theta`` and the ray coordinate is
``s = x cos(theta) + y sin(theta)``. Detector bin ``j`` covers ``[s_j - 1/2, s_j + 1/2]`` with
``s_j = j - (n_dtc - 1) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.core.logging import get_logger
from randtomo.models.entities import AngleSet, Image, SinogramBlock

logger = get_logger(__name__)

_ANGLE_CHUNK = 32
# Footprint entries (angles x pixels x 3) kept in memory per projection plan.
_PLAN_CACHE_LIMIT = 1 << 24


def default_detector_count(side: int) -> int:
    return math.ceil(side * math.sqrt(2.0)) + 1


def _footprint_cdf(
    t: np.ndarray, outer: np.ndarray, inner: np.ndarray, height: np.ndarray, ramp: np.ndarray
) -> np.ndarray:
    """Fraction of a projected pixel lying left of offset ``t`` from its centre."""
    safe_ramp = np.where(ramp > 0.0, ramp, 1.0)
    with np.errstate(invalid="ignore", over="ignore"):
        rise = height * (t + outer) ** 2 / (2.0 * safe_ramp)
        plateau = height * ramp / 2.0 + height * (t + inner)
        fall = 1.0 - height * (outer - t) ** 2 / (2.0 * safe_ramp)
    return np.select(
        [t <= -outer, t <= -inner, t <= inner, t < outer],
        [np.zeros_like(t), rise, plateau, fall],
        default=1.0,
    )


def _pixel_footprints(
    side: int, n_dtc: int, thetas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Detector bins and area weights, each of shape ``(len(thetas), side**2, 3)``."""
    coords = np.arange(side, dtype=np.float64) - (side - 1) / 2.0
    x = np.tile(coords, side)
    y = np.repeat(coords, side)
    cos = np.cos(thetas)[:, None]
    sin = np.sin(thetas)[:, None]
    centre = cos * x[None, :] + sin * y[None, :]

    abs_cos, abs_sin = np.abs(cos), np.abs(sin)
    outer = (abs_cos + abs_sin) / 2.0
    inner = np.abs(abs_cos - abs_sin) / 2.0
    height = 1.0 / (outer + inner)
    ramp = outer - inner

    first = np.floor(centre - outer + n_dtc / 2.0).astype(np.int64)
    bins = first[..., None] + np.arange(3)
    lower = bins - n_dtc / 2.0 - centre[..., None]
    shape = (slice(None), slice(None), None)
    params = (outer[shape], inner[shape], height[shape], ramp[shape])
    weights = _footprint_cdf(lower + 1.0, *params) - _footprint_cdf(lower, *params)

    outside = (bins < 0) | (bins >= n_dtc)
    weights[outside] = 0.0
    np.clip(bins, 0, n_dtc - 1, out=bins)
    return bins, weights


class _ProjectionPlan:
    """Footprints for an ordered list of angle indices, chunked and optionally cached."""

    __slots__ = ("side", "n_dtc", "thetas", "_cached")

    def __init__(self, side: int, n_dtc: int, thetas: np.ndarray) -> None:
        self.side = side
        self.n_dtc = n_dtc
        self.thetas = thetas
        self._cached: list[tuple[int, np.ndarray, np.ndarray]] | None = None
        if thetas.size * side * side * 3 <= _PLAN_CACHE_LIMIT:
            self._cached = list(self._build())

    def _build(self) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        for start in range(0, self.thetas.size, _ANGLE_CHUNK):
            chunk = self.thetas[start : start + _ANGLE_CHUNK]
            bins, weights = _pixel_footprints(self.side, self.n_dtc, chunk)
            rows = np.arange(chunk.size)[:, None, None] * self.n_dtc
            yield start, rows + bins, weights

    def chunks(self) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        return iter(self._cached) if self._cached is not None else self._build()

    def forward(self, values: np.ndarray) -> np.ndarray:
        out = np.empty((self.thetas.size, self.n_dtc))
        for start, flat, weights in self.chunks():
            m = flat.shape[0]
            contrib = weights * values[None, :, None]
            out[start : start + m] = np.bincount(
                flat.ravel(), weights=contrib.ravel(), minlength=m * self.n_dtc
            ).reshape(m, self.n_dtc)
        return out

    def backward(self, matrix: np.ndarray) -> np.ndarray:
        image = np.zeros(self.side * self.side)
        for start, flat, weights in self.chunks():
            m = flat.shape[0]
            block = matrix[start : start + m].ravel()
            image += np.einsum("apk,apk->p", weights, block[flat])
        return image


@dataclass(frozen=True)
class RadonOperator:
    """Full-grid transform A with ``n_theta`` angles and ``n_dtc`` detector bins per angle."""

    side: int
    n_theta: int
    n_dtc: int = field(default=0)

    def __post_init__(self) -> None:
        if self.side < 1:
            raise InvalidArgumentError(f"side must be positive, got {self.side}")
        if self.n_theta < 1:
            raise InvalidArgumentError(f"n_theta must be positive, got {self.n_theta}")
        minimum = default_detector_count(self.side)
        if self.n_dtc == 0:
            object.__setattr__(self, "n_dtc", minimum)
        elif self.n_dtc < minimum:
            raise InvalidArgumentError(
                f"n_dtc={self.n_dtc} does not cover the image diagonal (need >= {minimum})"
            )

    @property
    def n_pixels(self) -> int:
        return self.side * self.side

    def thetas(self, indices: np.ndarray | None = None) -> np.ndarray:
        idx = np.arange(self.n_theta) if indices is None else np.asarray(indices)
        return np.pi * idx.astype(np.float64) / self.n_theta

    @cached_property
    def _plan(self) -> _ProjectionPlan:
        return _ProjectionPlan(self.side, self.n_dtc, self.thetas())

    def _plan_for(self, indices: np.ndarray) -> _ProjectionPlan:
        return _ProjectionPlan(self.side, self.n_dtc, self.thetas(indices))

    def _check_image(self, f: Image) -> None:
        if f.side != self.side:
            raise DimensionError(f"image side {f.side} does not match operator side {self.side}")

    def apply(self, f: Image) -> SinogramBlock:
        self._check_image(f)
        return SinogramBlock(self._plan.forward(f.data).ravel(), self.n_theta, self.n_dtc)

    def adjoint(self, g: SinogramBlock) -> Image:
        if g.n_angles != self.n_theta or g.n_dtc != self.n_dtc:
            raise DimensionError(
                f"sinogram {g.n_angles}x{g.n_dtc} does not match operator "
                f"{self.n_theta}x{self.n_dtc}"
            )
        return Image(self._plan.backward(g.matrix), self.side)

    def subsample(self, angles: AngleSet) -> "SubsampledRadon":
        return SubsampledRadon(self, angles)

    def _block_matrix(self, k: int) -> sparse.csr_matrix:
        if not 0 <= k < self.n_theta:
            raise InvalidArgumentError(f"angle index {k} outside [0, {self.n_theta})")
        bins, weights = _pixel_footprints(self.side, self.n_dtc, self.thetas(np.array([k])))
        pixels = np.broadcast_to(np.arange(self.n_pixels)[:, None], bins[0].shape)
        return sparse.coo_matrix(
            (weights[0].ravel(), (bins[0].ravel(), pixels.ravel())),
            shape=(self.n_dtc, self.n_pixels),
        ).tocsr()

    def angle_block(self, k: int) -> np.ndarray:
        """Dense ``n_dtc x side**2`` row block of angle ``k``."""
        return self._block_matrix(k).toarray()

    def to_dense(self) -> np.ndarray:
        return sparse.vstack([self._block_matrix(k) for k in range(self.n_theta)]).toarray()

    def as_linear_operator(self) -> LinearOperator:
        return _linear_operator(self._plan, self.n_theta, self.n_dtc, self.n_pixels)

    @cached_property
    def norm_estimate(self) -> float:
        return estimate_op_norm(self)

    @cached_property
    def per_angle_norm_bound(self) -> float:
        """Largest spectral norm over the per-angle row blocks of A."""
        best = 0.0
        for k in range(self.n_theta):
            block = self._block_matrix(k)
            gram = (block @ block.T).toarray()
            best = max(best, float(np.linalg.eigvalsh(gram)[-1]))
        return math.sqrt(best)

    def _project_thetas(self, f: Image, thetas: np.ndarray) -> np.ndarray:
        self._check_image(f)
        return _ProjectionPlan(self.side, self.n_dtc, np.asarray(thetas, dtype=np.float64)).forward(
            f.data
        )


@dataclass(frozen=True)
class SubsampledRadon:
    """Row-block selection A_θ of a :class:`RadonOperator`, in AngleSet order."""

    base: RadonOperator
    angles: AngleSet

    def __post_init__(self) -> None:
        if self.angles.n_theta != self.base.n_theta:
            raise InvalidArgumentError(
                f"angle set refers to a grid of {self.angles.n_theta} angles, operator has "
                f"{self.base.n_theta}"
            )

    @property
    def n_angles(self) -> int:
        return len(self.angles)

    @property
    def side(self) -> int:
        return self.base.side

    @property
    def n_dtc(self) -> int:
        return self.base.n_dtc

    @cached_property
    def _plan(self) -> _ProjectionPlan:
        return self.base._plan_for(self.angles.as_array())

    def apply(self, f: Image) -> SinogramBlock:
        self.base._check_image(f)
        return SinogramBlock(self._plan.forward(f.data).ravel(), self.n_angles, self.n_dtc)

    def adjoint(self, g: SinogramBlock) -> Image:
        if g.n_angles != self.n_angles or g.n_dtc != self.n_dtc:
            raise DimensionError(
                f"sinogram {g.n_angles}x{g.n_dtc} does not match subsampled operator "
                f"{self.n_angles}x{self.n_dtc}"
            )
        return Image(self._plan.backward(g.matrix), self.side)

    def as_linear_operator(self) -> LinearOperator:
        return _linear_operator(self._plan, self.n_angles, self.n_dtc, self.base.n_pixels)

    def to_dense(self) -> np.ndarray:
        blocks = [self.base._block_matrix(k) for k in self.angles.indices]
        return sparse.vstack(blocks).toarray()

    @cached_property
    def norm_estimate(self) -> float:
        return estimate_op_norm(self)


def _linear_operator(
    plan: _ProjectionPlan, n_angles: int, n_dtc: int, n_pixels: int
) -> LinearOperator:
    def matvec(v: np.ndarray) -> np.ndarray:
        return plan.forward(np.asarray(v, dtype=np.float64).ravel()).ravel()

    def rmatvec(v: np.ndarray) -> np.ndarray:
        return plan.backward(np.asarray(v, dtype=np.float64).reshape(n_angles, n_dtc))

    return LinearOperator(
        shape=(n_angles * n_dtc, n_pixels), matvec=matvec, rmatvec=rmatvec, dtype=np.float64
    )


OperatorLike = RadonOperator | SubsampledRadon | LinearOperator | np.ndarray


def as_operator(op: OperatorLike) -> tuple[LinearOperator, int]:
    """Return a scipy LinearOperator for ``op`` and its number of angle samples."""
    if isinstance(op, RadonOperator):
        return op.as_linear_operator(), op.n_theta
    if isinstance(op, SubsampledRadon):
        return op.as_linear_operator(), op.n_angles
    if isinstance(op, np.ndarray):
        matrix = np.atleast_2d(np.asarray(op, dtype=np.float64))
        return aslinearoperator(matrix), matrix.shape[0]
    if isinstance(op, LinearOperator):
        return op, op.shape[0]
    raise InvalidArgumentError(f"unsupported operator type {type(op).__name__}")


def estimate_op_norm(
    op: OperatorLike, *, seed: int = 0, tol: float = 1e-10, max_iters: int = 5000
) -> float:
    """Largest singular value by power iteration on AᵀA from a seeded start vector."""
    linear, _ = as_operator(op)
    n = linear.shape[1]
    if n < 1 or linear.shape[0] < 1:
        raise DimensionError(f"operator has empty shape {linear.shape}")
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    previous = 0.0
    eigen = 0.0
    for iteration in range(1, max_iters + 1):
        w = linear.rmatvec(linear.matvec(v))
        eigen = float(np.dot(v, w))
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(eigen - previous) <= tol * abs(eigen):
            break
        previous = eigen
    else:
        logger.warning("Power iteration stopped after %s iterations", max_iters)
    logger.debug("Operator norm converged after %s iterations", iteration)
    return math.sqrt(max(eigen, 0.0))


def radon_apply(op: RadonOperator, f: Image) -> SinogramBlock:
    return op.apply(f)


def radon_adjoint(op: RadonOperator, g: SinogramBlock) -> Image:
    return op.adjoint(g)


def subsample(op: RadonOperator, angles: AngleSet) -> SubsampledRadon:
    return op.subsample(angles)


__all__ = [
    "OperatorLike",
    "RadonOperator",
    "SubsampledRadon",
    "as_operator",
    "default_detector_count",
    "estimate_op_norm",
    "radon_apply",
    "radon_adjoint",
    "subsample",
]
