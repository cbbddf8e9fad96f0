"""Damped CGLS for ridge problems posed through an operator's adjoint."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from randtomo.core.errors import ConvergenceError, DimensionError, InvalidArgumentError
from randtomo.core.logging import get_logger
from randtomo.models.entities import SinogramBlock
from randtomo.operators.radon import OperatorLike, as_operator

logger = get_logger(__name__)


@dataclass(slots=True)
class RidgeSolution:
    solution: np.ndarray
    iterations: int
    residual_trace: np.ndarray
    gradient_norms: np.ndarray

    def as_block(self, n_angles: int, n_dtc: int) -> SinogramBlock:
        """The solution as a sinogram over ``n_angles`` rows of ``n_dtc`` cells."""
        return SinogramBlock(self.solution, n_angles, n_dtc)


def cgls_ridge(
    op: OperatorLike,
    b: np.ndarray,
    lam: float,
    tol: float = 1e-10,
    max_iters: int = 5000,
) -> RidgeSolution:
    """Minimize ``0.5 * ||Aᵀ w - b||² + lam * ||w||²`` over ``w``.

    Equivalent to the normal equations ``(A Aᵀ + 2 lam I) w = A b``. Iterates until the
    gradient norm falls to ``tol`` times its initial value. ``residual_trace`` holds the
    augmented residual ``sqrt(||Aᵀw - b||² + 2 lam ||w||²)``, which CGLS never increases.
    """
    if lam <= 0:
        raise InvalidArgumentError(f"ridge parameter must be positive, got {lam}")
    linear, _ = as_operator(op)
    b = np.asarray(b, dtype=np.float64).ravel()
    if b.size != linear.shape[1]:
        raise DimensionError(f"right-hand side has {b.size} entries, expected {linear.shape[1]}")

    damping = 2.0 * lam
    w = np.zeros(linear.shape[0])
    residual = b.copy()
    gradient = linear.matvec(residual)
    direction = gradient.copy()
    gamma = float(np.dot(gradient, gradient))
    initial = np.sqrt(gamma)
    residual_trace = [float(np.linalg.norm(residual))]
    gradient_norms = [initial]
    if initial == 0.0:
        return RidgeSolution(w, 0, np.asarray(residual_trace), np.asarray(gradient_norms))

    for iteration in range(1, max_iters + 1):
        q = linear.rmatvec(direction)
        curvature = float(np.dot(q, q)) + damping * float(np.dot(direction, direction))
        step = gamma / curvature
        w += step * direction
        residual -= step * q
        gradient = linear.matvec(residual) - damping * w
        gamma_new = float(np.dot(gradient, gradient))
        residual_trace.append(
            float(np.sqrt(np.dot(residual, residual) + damping * np.dot(w, w)))
        )
        gradient_norms.append(float(np.sqrt(gamma_new)))
        if np.sqrt(gamma_new) <= tol * initial:
            logger.debug("CGLS converged after %s iterations", iteration)
            return RidgeSolution(
                w, iteration, np.asarray(residual_trace), np.asarray(gradient_norms)
            )
        direction = gradient + (gamma_new / gamma) * direction
        gamma = gamma_new

    raise ConvergenceError(
        "CGLS did not reach the requested gradient reduction",
        residual=gradient_norms[-1] / initial,
        iterations=max_iters,
    )


__all__ = ["RidgeSolution", "cgls_ridge"]
