"""Proximal gradient descent with Barzilai-Borwein steps for

    min_f  1/(2N) ||A_θ f - g||² + α R(f).

Steps are accepted when the objective does not exceed the largest of the last ``memory``
accepted values; rejected steps are halved. Non-finite or exploding objectives count as
rejections, and halving below ``tau_min`` raises DivergenceError.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from randtomo.core.errors import DimensionError, DivergenceError, InvalidArgumentError
from randtomo.core.logging import get_logger
from randtomo.core.metrics import SOLVE_COUNT, SOLVE_ITERATIONS
from randtomo.models.dto import SolverConfig
from randtomo.models.entities import Image, SinogramBlock
from randtomo.operators.radon import OperatorLike, as_operator, estimate_op_norm
from randtomo.regularization.penalty import Penalty
from randtomo.utils.linalg import weighted_residual_norm_sq

logger = get_logger(__name__)

_TINY = 1e-300
_ACCEPT_SLACK = 10.0 * np.finfo(np.float64).eps


@dataclass(slots=True)
class SolveResult:
    reconstruction: Image
    iterations: int
    objective_trace: np.ndarray
    converged: bool
    final_step: float
    fixed_point_residual: float = 0.0
    step_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    change_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    stop_reason: str = "max_iters"

    def trace_frame(self) -> pd.DataFrame:
        """Per-iteration table: iteration, objective, step, residual (relative change)."""
        steps = np.concatenate([[np.nan], self.step_trace])
        changes = np.concatenate([[np.nan], self.change_trace])
        return pd.DataFrame(
            {
                "iteration": np.arange(self.objective_trace.size),
                "objective": self.objective_trace,
                "step": steps,
                "residual": changes,
            }
        )

    @property
    def increases(self) -> int:
        return int(np.sum(np.diff(self.objective_trace) > 0.0))


def _check_shapes(linear_shape: tuple[int, int], g: SinogramBlock, pen: Penalty) -> None:
    if linear_shape[0] != g.data.size:
        raise DimensionError(
            f"operator produces {linear_shape[0]} readings, data has {g.data.size}"
        )
    if linear_shape[1] != pen.transform.size:
        raise DimensionError(
            f"operator acts on {linear_shape[1]} pixels, penalty on {pen.transform.size}"
        )


def objective(op: OperatorLike, g: SinogramBlock, pen: Penalty, alpha: float, f: Image) -> float:
    """(1/2N) ||A_θ f - g||² + α R(f) with N the number of sampled angles in ``g``."""
    if alpha <= 0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha}")
    linear, _ = as_operator(op)
    _check_shapes(linear.shape, g, pen)
    residual = linear.matvec(f.data) - g.data
    return 0.5 * float(np.dot(residual, residual)) / g.n_angles + alpha * pen.eval_R(f)


def bb_step(
    s: np.ndarray,
    y: np.ndarray,
    variant: Literal["BB1", "BB2"],
    bounds: tuple[float, float],
    tau_init: float,
) -> float:
    """Barzilai-Borwein step from iterate and gradient differences, clamped to ``bounds``."""
    s = np.asarray(s, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if s.shape != y.shape:
        raise DimensionError(f"s and y differ in length: {s.size} vs {y.size}")
    sy = float(np.dot(s, y))
    if sy <= 0.0:
        return tau_init
    if variant == "BB1":
        tau = float(np.dot(s, s)) / sy
    elif variant == "BB2":
        tau = sy / float(np.dot(y, y))
    else:
        raise InvalidArgumentError(f"unknown BB variant {variant!r}")
    return float(np.clip(tau, bounds[0], bounds[1]))


def default_step(op: OperatorLike, n_samples: int) -> float:
    """``N / ||A_θ||²``, the reciprocal Lipschitz constant of the data-term gradient."""
    norm = estimate_op_norm(op, tol=1e-6)
    return n_samples / norm**2 if norm > 0.0 else 1.0


def pgd_solve(
    op: OperatorLike,
    g: SinogramBlock,
    pen: Penalty,
    alpha: float,
    cfg: SolverConfig | None = None,
    f0: Image | None = None,
) -> SolveResult:
    if alpha <= 0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha}")
    cfg = cfg or SolverConfig()
    linear, _ = as_operator(op)
    _check_shapes(linear.shape, g, pen)
    n = g.n_angles
    transform = pen.transform

    if f0 is not None and f0.side != pen.side:
        raise DimensionError(f"initial image side {f0.side} does not match penalty side {pen.side}")
    f = np.zeros(transform.size) if f0 is None else f0.data.copy()

    default_tau = default_step(op, n) if cfg.tau_init is None else cfg.tau_init
    tau_init, tau_min, tau_max = cfg.step_bounds(default_tau)

    def data_term(x: np.ndarray) -> tuple[np.ndarray, float]:
        residual = linear.matvec(x) - g.data
        return linear.rmatvec(residual) / n, 0.5 * float(np.dot(residual, residual)) / n

    def forward_backward(x: np.ndarray, grad: np.ndarray, tau: float) -> np.ndarray:
        coeffs = transform.analysis(x - tau * grad)
        return transform.synthesis_array(pen.prox(coeffs, tau * alpha))

    grad, fit = data_term(f)
    obj = fit + alpha * pen.eval_R(f)
    start = obj
    window: deque[float] = deque([obj], maxlen=cfg.memory)
    objectives = [obj]
    steps: list[float] = []
    changes: list[float] = []
    tau = tau_init
    tau_used = tau_init
    stall = 0
    converged = False
    reason = "max_iters"

    for iteration in range(1, cfg.max_iters + 1):
        reference = max(window)
        while True:
            candidate = forward_backward(f, grad, tau)
            grad_new, fit_new = data_term(candidate)
            obj_new = fit_new + alpha * pen.eval_R(candidate)
            ceiling = cfg.divergence_factor * max(start, _TINY)
            blown_up = not np.isfinite(obj_new) or obj_new > ceiling
            if not blown_up and obj_new <= reference + _ACCEPT_SLACK * max(abs(reference), 1.0):
                break
            tau *= 0.5
            if tau < tau_min:
                SOLVE_COUNT.labels(outcome="diverged").inc()
                raise DivergenceError(
                    "step size fell below its lower bound without decreasing the objective",
                    tau=tau,
                    objective=float(obj_new),
                )

        s = candidate - f
        y = grad_new - grad
        change = float(np.linalg.norm(s)) / max(float(np.linalg.norm(candidate)), _TINY)
        previous = obj
        f, grad, obj = candidate, grad_new, obj_new
        tau_used = tau
        window.append(obj)
        objectives.append(obj)
        steps.append(tau)
        changes.append(change)
        if cfg.trace:
            logger.debug(
                "PGD iteration",
                extra={
                    "ctx_iteration": iteration,
                    "ctx_objective": obj,
                    "ctx_tau": tau,
                    "ctx_change": change,
                },
            )

        if change < cfg.rel_tol:
            converged, reason = True, "rel_change"
            break
        if abs(previous - obj) <= cfg.obj_tol * max(abs(previous), _TINY):
            stall += 1
            if stall >= cfg.stall_window:
                converged, reason = True, "objective_stall"
                break
        else:
            stall = 0
        tau = bb_step(s, y, cfg.bb_variant, (tau_min, tau_max), tau_init)

    fixed_point = float(np.linalg.norm(f - forward_backward(f, grad, tau_used)))
    norm_f = float(np.linalg.norm(f))
    if converged and fixed_point > 10.0 * cfg.rel_tol * max(norm_f, _TINY):
        converged = False
        reason = f"{reason}_residual"
    iterations = len(objectives) - 1

    outcome = "converged" if converged else "unconverged"
    SOLVE_COUNT.labels(outcome=outcome).inc()
    SOLVE_ITERATIONS.observe(iterations)
    logger.debug(
        "PGD stopped: %s",
        reason,
        extra={"ctx_iterations": iterations, "ctx_tau": tau_used, "ctx_objective": obj},
    )
    return SolveResult(
        reconstruction=Image(f, pen.side),
        iterations=iterations,
        objective_trace=np.asarray(objectives),
        converged=converged,
        final_step=tau_used,
        fixed_point_residual=fixed_point,
        step_trace=np.asarray(steps),
        change_trace=np.asarray(changes),
        stop_reason=reason,
    )


def apriori_check(
    result: SolveResult,
    pen: Penalty,
    f_dagger: Image,
    delta: float,
    alpha: float,
    noise: SinogramBlock,
    slack: float = 0.01,
) -> bool:
    """Whether R(f_sol) <= R(f†) + δ²/(2α) ||ε||²_N holds with relative ``slack``."""
    bound = pen.eval_R(f_dagger) + delta**2 / (2.0 * alpha) * weighted_residual_norm_sq(noise)
    return pen.eval_R(result.reconstruction) <= (1.0 + slack) * bound


__all__ = [
    "SolveResult",
    "apriori_check",
    "bb_step",
    "default_step",
    "objective",
    "pgd_solve",
]
