"""Monte-Carlo sweeps over the number of sampled angles."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np
import pandas as pd

from randtomo.core.errors import DivergenceError, InvalidArgumentError, SweepFailedError
from randtomo.core.logging import configure_logging, get_logger, logging_state
from randtomo.core.metrics import FITTED_BETA, REALIZATION_FAILURES, SWEEP_DURATION
from randtomo.experiments.fit import RateFitResult, aggregate_records, fit_monomial
from randtomo.experiments.plan import ExperimentPlan, penalty_for
from randtomo.models.entities import SinogramBlock
from randtomo.operators.radon import RadonOperator, SubsampledRadon
from randtomo.regularization.penalty import Penalty
from randtomo.solvers.pgd import apriori_check, pgd_solve
from randtomo.utils.rng import ANGLE_STREAM, NOISE_STREAM, gaussian_noise, sample_angles

logger = get_logger(__name__)

RECORD_COLUMNS = (
    "p",
    "regime",
    "N",
    "realization",
    "seed",
    "delta",
    "alpha",
    "bregman",
    "objective",
    "iterations",
    "converged",
    "apriori_ok",
    "status",
)


@dataclass(slots=True)
class RealizationRecord:
    p: float
    regime: str
    N: int
    realization: int
    seed: int
    delta: float
    alpha: float
    bregman: float
    objective: float
    iterations: int
    converged: bool
    apriori_ok: bool
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(slots=True)
class SweepStats:
    completed: int = 0
    failed: int = 0
    unconverged: int = 0
    apriori_violations: int = 0

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(slots=True)
class SweepResult:
    fit: RateFitResult
    records: pd.DataFrame
    summary: pd.DataFrame
    stats: SweepStats = field(default_factory=SweepStats)


@lru_cache(maxsize=4)
def _operator(side: int, n_theta: int) -> RadonOperator:
    return RadonOperator(side, n_theta)


@lru_cache(maxsize=8)
def _penalty(p: float, side: int) -> Penalty:
    return penalty_for(p, side)


@dataclass(slots=True)
class Realization:
    """Sampled operator, noisy data and the unit noise draw of one (N, realization) task."""

    operator: SubsampledRadon
    data: SinogramBlock
    noise: SinogramBlock
    delta: float
    alpha: float


def draw_realization(
    plan: ExperimentPlan, n: int, realization_idx: int, op: RadonOperator | None = None
) -> Realization:
    if n not in plan.n_values:
        raise InvalidArgumentError(f"N={n} is not part of the plan {plan.n_values}")
    if not 0 <= realization_idx < plan.realizations:
        raise InvalidArgumentError(
            f"realization index {realization_idx} outside [0, {plan.realizations})"
        )
    op = op or _operator(plan.side, plan.n_theta)
    angle_seed = plan.base_seed.with_stream(ANGLE_STREAM).derive(n, realization_idx)
    noise_seed = plan.base_seed.with_stream(NOISE_STREAM).derive(n, realization_idx)
    sub = op.subsample(sample_angles(n, plan.n_theta, angle_seed))
    clean = sub.apply(plan.phantom.f_dagger)
    noise = SinogramBlock(gaussian_noise(clean.data.size, noise_seed), n, op.n_dtc)
    delta = plan.regime.delta(n)
    alpha = plan.schedule.alpha(n)
    data = SinogramBlock(clean.data + delta * noise.data, n, op.n_dtc)
    return Realization(sub, data, noise, delta, alpha)


def run_realization(
    plan: ExperimentPlan, n: int, realization_idx: int, op: RadonOperator | None = None
) -> RealizationRecord:
    """One draw of angles and noise, one reconstruction, one Bregman distance to f†."""
    drawn = draw_realization(plan, n, realization_idx, op)
    pen = _penalty(plan.p, plan.side)
    f_dagger = plan.phantom.f_dagger
    try:
        result = pgd_solve(drawn.operator, drawn.data, pen, drawn.alpha, plan.solver)
    except DivergenceError as exc:
        exc.add_note(f"seed={plan.base_seed.seed} N={n} realization={realization_idx}")
        raise

    return RealizationRecord(
        p=plan.p,
        regime=plan.regime.kind,
        N=n,
        realization=realization_idx,
        seed=plan.base_seed.seed,
        delta=drawn.delta,
        alpha=drawn.alpha,
        bregman=pen.bregman(result.reconstruction, f_dagger),
        objective=float(result.objective_trace[-1]),
        iterations=result.iterations,
        converged=result.converged,
        apriori_ok=apriori_check(result, pen, f_dagger, drawn.delta, drawn.alpha, drawn.noise),
    )


def _run_task(plan: ExperimentPlan, n: int, realization_idx: int) -> RealizationRecord:
    try:
        return run_realization(plan, n, realization_idx)
    except Exception as exc:
        logger.warning(
            "Realization failed: %s",
            exc,
            extra={"ctx_n": n, "ctx_realization": realization_idx},
        )
        return RealizationRecord(
            p=plan.p,
            regime=plan.regime.kind,
            N=n,
            realization=realization_idx,
            seed=plan.base_seed.seed,
            delta=plan.regime.delta(n),
            alpha=plan.schedule.alpha(n),
            bregman=math.nan,
            objective=math.nan,
            iterations=0,
            converged=False,
            apriori_ok=False,
            status=f"failed:{type(exc).__name__}",
        )


def records_frame(records: Sequence[RealizationRecord]) -> pd.DataFrame:
    rows = [asdict(record) for record in records]
    return pd.DataFrame(rows, columns=list(RECORD_COLUMNS))


def _execute(plan: ExperimentPlan, workers: int) -> list[RealizationRecord]:
    tasks = [(n, idx) for n in plan.n_values for idx in range(plan.realizations)]
    if workers <= 1:
        records = [_run_task(plan, n, idx) for n, idx in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=configure_logging, initargs=logging_state()
        ) as pool:
            futures = [pool.submit(_run_task, plan, n, idx) for n, idx in tasks]
            records = [future.result() for future in futures]
    return sorted(records, key=lambda record: (record.N, record.realization))


def run_sweep(
    plan: ExperimentPlan, workers: int = 1, failure_tolerance: float = 0.05
) -> SweepResult:
    """Run every (N, realization) task, aggregate means per N and fit c N^β.

    Failed realizations are dropped from the averages while they stay below
    ``failure_tolerance`` of all tasks; otherwise :class:`SweepFailedError` carries the table.
    """
    started = time.perf_counter()
    logger.info(
        "Starting sweep",
        extra={
            "ctx_p": plan.p,
            "ctx_regime": plan.regime.kind,
            "ctx_n_values": list(plan.n_values),
            "ctx_realizations": plan.realizations,
        },
    )
    records = _execute(plan, workers)
    frame = records_frame(records)

    stats = SweepStats()
    for record in records:
        if record.ok:
            stats.completed += 1
            stats.unconverged += int(not record.converged)
            stats.apriori_violations += int(record.converged and not record.apriori_ok)
        else:
            stats.failed += 1
            REALIZATION_FAILURES.labels(error=record.status.split(":", 1)[-1]).inc()

    total = len(records)
    if stats.failed and stats.failed >= failure_tolerance * total:
        raise SweepFailedError(
            f"{stats.failed} of {total} realizations failed (tolerance {failure_tolerance:.0%})",
            records=frame,
            failures=stats.failed,
        )
    table = aggregate_records(frame)
    missing = sorted(set(plan.n_values) - set(table["N"].astype(int)))
    if missing:
        raise SweepFailedError(
            f"no successful realization for N in {missing}", records=frame, failures=stats.failed
        )

    fit = fit_monomial(
        table["N"].to_numpy(), table["mean_bregman"].to_numpy(), table["stddev"].to_numpy()
    )
    elapsed = time.perf_counter() - started
    SWEEP_DURATION.labels(regime=plan.regime.kind).observe(elapsed)
    FITTED_BETA.labels(p=f"{plan.p:g}", regime=plan.regime.kind).set(fit.beta)
    logger.info(
        "Sweep finished",
        extra={"ctx_beta": fit.beta, "ctx_c": fit.c, "ctx_seconds": elapsed, **_ctx(stats)},
    )
    return SweepResult(fit=fit, records=frame, summary=fit.summary_frame(), stats=stats)


def _ctx(stats: SweepStats) -> dict[str, int]:
    return {f"ctx_{key}": value for key, value in stats.to_dict().items()}


def scan_c_alpha(
    plan: ExperimentPlan,
    grid: Sequence[float],
    realizations: int | None = None,
    workers: int = 1,
) -> tuple[float, pd.DataFrame]:
    """Pick the c_α minimizing the mean Bregman distance averaged over N on a reduced sweep."""
    if not grid:
        raise InvalidArgumentError("c_alpha grid must not be empty")
    reduced = plan.realizations if realizations is None else min(realizations, plan.realizations)
    scores: list[float] = []
    for c_alpha in grid:
        candidate = replace(plan.with_c_alpha(float(c_alpha)), realizations=reduced)
        try:
            result = run_sweep(candidate, workers=workers)
            scores.append(float(np.mean(result.fit.per_N_means)))
        except SweepFailedError as exc:
            logger.warning("c_alpha=%s discarded: %s", c_alpha, exc)
            scores.append(math.inf)
    table = pd.DataFrame({"c_alpha": [float(c) for c in grid], "score": scores})
    best = int(np.argmin(scores))
    if not math.isfinite(scores[best]):
        raise SweepFailedError("every c_alpha candidate failed", records=table, failures=len(grid))
    return float(grid[best]), table


__all__ = [
    "RECORD_COLUMNS",
    "Realization",
    "RealizationRecord",
    "SweepResult",
    "SweepStats",
    "draw_realization",
    "records_frame",
    "run_realization",
    "run_sweep",
    "scan_c_alpha",
]
