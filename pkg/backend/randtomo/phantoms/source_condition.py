"""Projection of a phantom onto the range condition ∂R(f†) = Aᵀ w."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from randtomo.core.errors import InvalidArgumentError
from randtomo.core.logging import get_logger
from randtomo.models.entities import Image, RngSeed, SinogramBlock
from randtomo.operators.radon import RadonOperator, SubsampledRadon, estimate_op_norm
from randtomo.regularization.penalty import Penalty
from randtomo.solvers.cgls import cgls_ridge

logger = get_logger(__name__)


@dataclass(slots=True)
class SourceConditionResult:
    f_dagger: Image
    w: SinogramBlock
    sc_residual: float
    rel_change: float
    lambda_sc: float = 0.0
    iterations: int = 0
    atw_norm: float = 0.0

    def provenance(self, pen: Penalty) -> dict[str, Any]:
        return {
            "p": pen.p,
            "lambda_sc": self.lambda_sc,
            "sc_residual": self.sc_residual,
            "sc_residual_relative": self.sc_residual / self.atw_norm if self.atw_norm else 0.0,
            "rel_change": self.rel_change,
            "cgls_iterations": self.iterations,
            "R_f_dagger": pen.eval_R(self.f_dagger),
            "w_norm": float(np.linalg.norm(self.w.data)),
        }


def default_lambda(op: RadonOperator | SubsampledRadon, seed: int = 0) -> float:
    """``1e-3 * ||A||²``."""
    return 1e-3 * estimate_op_norm(op, seed=seed) ** 2


def project_to_source_condition(
    f0: Image,
    op: RadonOperator | SubsampledRadon,
    pen: Penalty,
    lambda_sc: float | None = None,
    rng: RngSeed | None = None,
    tol: float = 1e-10,
    max_iters: int = 5000,
) -> SourceConditionResult:
    """Find w with Aᵀw close to ∂R(f0) by ridge regression and rebuild f† from Aᵀw exactly."""
    seed = rng.seed if rng is not None else 0
    if lambda_sc is None:
        lambda_sc = default_lambda(op, seed)
    if lambda_sc <= 0:
        raise InvalidArgumentError(f"lambda_sc must be positive, got {lambda_sc}")
    n_angles = op.n_theta if isinstance(op, RadonOperator) else op.n_angles

    target = pen.subgradient(f0).data
    ridge = cgls_ridge(op, target, lambda_sc, tol=tol, max_iters=max_iters)
    w = ridge.as_block(n_angles, op.n_dtc)
    atw = op.adjoint(w).data
    f_dagger = pen.inverse_subgradient(atw)

    sc_residual = float(np.linalg.norm(pen.subgradient(f_dagger).data - atw))
    norm_f0 = f0.norm()
    rel_change = float(np.linalg.norm(f_dagger.data - f0.data)) / norm_f0 if norm_f0 > 0 else 0.0
    logger.info(
        "Projected phantom onto the source condition",
        extra={
            "ctx_lambda_sc": lambda_sc,
            "ctx_rel_change": rel_change,
            "ctx_iterations": ridge.iterations,
        },
    )
    return SourceConditionResult(
        f_dagger=f_dagger,
        w=w,
        sc_residual=sc_residual,
        rel_change=rel_change,
        lambda_sc=float(lambda_sc),
        iterations=ridge.iterations,
        atw_norm=float(np.linalg.norm(atw)),
    )


__all__ = ["SourceConditionResult", "default_lambda", "project_to_source_condition"]
