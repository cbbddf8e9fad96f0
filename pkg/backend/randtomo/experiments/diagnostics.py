"""Numerical diagnostics: effective dimension, the quadratic approximation term, the Besov
summability sum and operator sanity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator

from randtomo.core.errors import CapabilityError, DimensionError, InvalidArgumentError
from randtomo.models.entities import Image, SinogramBlock
from randtomo.operators.radon import OperatorLike, RadonOperator, SubsampledRadon, as_operator
from randtomo.regularization.penalty import Penalty, critical_smoothness, dyadic_weights

DEFAULT_SVD_CAP = 4_000_000


def dense_normalized(op: OperatorLike, svd_cap: int = DEFAULT_SVD_CAP) -> np.ndarray:
    """Dense K = A / sqrt(N) for radon operators; plain matrices and linear maps as given."""
    linear, _ = as_operator(op)
    rows, cols = linear.shape
    if rows * cols > svd_cap:
        raise CapabilityError(
            f"dense {rows}x{cols} matrix exceeds the cap of {svd_cap} entries; "
            "subsample the operator, lower the side or raise diagnostics.svd_cap"
        )
    if isinstance(op, RadonOperator):
        return op.to_dense() / math.sqrt(op.n_theta)
    if isinstance(op, SubsampledRadon):
        return op.to_dense() / math.sqrt(op.n_angles)
    if isinstance(op, np.ndarray):
        return np.atleast_2d(np.asarray(op, dtype=np.float64))
    if isinstance(op, LinearOperator):
        return op.matmat(np.eye(cols))
    raise InvalidArgumentError(f"unsupported operator type {type(op).__name__}")


def effective_dimension(
    op: OperatorLike, alpha: float | np.ndarray, svd_cap: int = DEFAULT_SVD_CAP
) -> float | np.ndarray:
    """tr[(B + α)⁻¹ B] with B = KᵀK, i.e. Σ σ²/(σ² + α) over the singular values of K."""
    alphas = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    if np.any(~(alphas > 0)):
        raise InvalidArgumentError("alpha must be positive")
    sigma_sq = linalg.svdvals(dense_normalized(op, svd_cap)) ** 2
    values = np.sum(sigma_sq[None, :] / (sigma_sq[None, :] + alphas[:, None]), axis=1)
    if np.ndim(alpha) == 0:
        return float(values[0])
    return values


def script_R_quadratic(
    op: OperatorLike,
    f_dagger: Image | np.ndarray,
    beta: float,
    pen: Penalty | None = None,
    svd_cap: int = DEFAULT_SVD_CAP,
) -> float:
    """(β/2) ⟨f†, (KᵀK + βI)⁻¹ f†⟩, the infimum of the quadratic source-approximation energy.

    Only defined for the quadratic penalty: p = 2 with the identity transform.
    """
    if pen is not None and (pen.p != 2.0 or pen.transform.kind != "identity"):
        raise CapabilityError(
            f"the closed form holds for p = 2 with the identity transform, got p={pen.p} "
            f"with {pen.transform.kind}"
        )
    if beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")
    matrix = dense_normalized(op, svd_cap)
    f = f_dagger.data if isinstance(f_dagger, Image) else np.asarray(f_dagger, dtype=np.float64)
    if f.size != matrix.shape[1]:
        raise DimensionError(f"f† has {f.size} entries, operator acts on {matrix.shape[1]}")
    system = matrix.T @ matrix + beta * np.eye(matrix.shape[1])
    solved = linalg.solve(system, f, assume_a="pos")
    return 0.5 * beta * float(np.dot(f, solved))


@dataclass(slots=True)
class BesovSum:
    partial_sums: np.ndarray
    level_subtotals: dict[int, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0


def besov_assumption_sum(
    op: RadonOperator, pen: Penalty, truncation: int, s: float | None = None
) -> BesovSum:
    """Partial sums of Σ_λ c_{λ,q,-s,d} ‖Aψ_λ‖^q, coarse levels first.

    ‖Aψ_λ‖ is the largest per-angle Euclidean norm of the projection of basis function ψ_λ over
    the fine angle grid; ``s`` defaults to the penalty's smoothness.
    """
    size = pen.transform.size
    if not 0 <= truncation <= size:
        raise InvalidArgumentError(f"truncation must lie in [0, {size}], got {truncation}")
    if op.side != pen.side:
        raise DimensionError(f"operator side {op.side} does not match penalty side {pen.side}")
    if truncation == 0:
        return BesovSum(np.zeros(0))

    if s is None:
        s = pen.smoothness if pen.smoothness is not None else critical_smoothness(pen.p)
    levels = pen.transform.coefficient_levels()
    order = np.argsort(levels, kind="stable")[:truncation]
    weights = dyadic_weights(pen.q, -s, 2, levels[order])

    z_norms = np.empty(truncation)
    coefficients = np.zeros(size)
    for position, index in enumerate(order):
        coefficients[index] = 1.0
        psi = pen.transform.synthesis(coefficients)
        coefficients[index] = 0.0
        sinogram = op.apply(psi).matrix
        z_norms[position] = float(np.max(np.linalg.norm(sinogram, axis=1)))

    terms = weights * z_norms**pen.q
    subtotals: dict[int, float] = {}
    for level, term in zip(levels[order].tolist(), terms.tolist()):
        subtotals[level] = subtotals.get(level, 0.0) + term
    return BesovSum(np.cumsum(terms), subtotals)


def adjoint_mismatch(
    op: RadonOperator | SubsampledRadon, trials: int = 20, seed: int = 0
) -> float:
    """Largest |⟨Af, g⟩ - ⟨f, Aᵀg⟩| / (‖Af‖‖g‖) over random pairs."""
    rng = np.random.default_rng(seed)
    n_angles = op.n_theta if isinstance(op, RadonOperator) else op.n_angles
    worst = 0.0
    for _ in range(trials):
        f = Image(rng.standard_normal(op.side * op.side), op.side)
        g = SinogramBlock(rng.standard_normal(n_angles * op.n_dtc), n_angles, op.n_dtc)
        af = op.apply(f)
        lhs = float(np.dot(af.data, g.data))
        rhs = float(np.dot(f.data, op.adjoint(g).data))
        scale = float(np.linalg.norm(af.data) * np.linalg.norm(g.data))
        worst = max(worst, abs(lhs - rhs) / scale if scale else 0.0)
    return worst


def mass_mismatch(op: RadonOperator, f: Image) -> float:
    """Largest relative deviation of a per-angle detector sum from the image mass."""
    mass = float(np.sum(f.data))
    sums = op.apply(f).matrix.sum(axis=1)
    return float(np.max(np.abs(sums - mass))) / max(abs(mass), np.finfo(np.float64).tiny)


def kappa(op: RadonOperator) -> dict[str, float]:
    """Bound κ = max_θ ‖A(θ)‖ on the per-angle blocks, next to the averaged norm ‖A‖/√N_θ.

    The averaged norm never exceeds κ.
    """
    block = op.per_angle_norm_bound
    full = op.norm_estimate
    return {
        "kappa": block,
        "operator_norm": full,
        "averaged_norm": full / math.sqrt(op.n_theta),
    }


__all__ = [
    "BesovSum",
    "DEFAULT_SVD_CAP",
    "adjoint_mismatch",
    "besov_assumption_sum",
    "dense_normalized",
    "effective_dimension",
    "kappa",
    "mass_mismatch",
    "script_R_quadratic",
]
