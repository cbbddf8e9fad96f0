"""Desk-scale convergence-rate regressions. Slow: run with ``pytest -m slow``."""

from __future__ import annotations

import pytest

from randtomo.core.config import DESK_N_VALUES
from randtomo.experiments.plan import build_plan, penalty_for
from randtomo.experiments.runner import run_sweep
from randtomo.models.entities import RngSeed
from randtomo.operators.radon import RadonOperator
from randtomo.phantoms.builtin import plant
from randtomo.phantoms.source_condition import project_to_source_condition

pytestmark = pytest.mark.slow

EXPECTED_BETA = {"decreasing": (-1.25, -0.75), "fixed": (-0.48, -0.22)}


@pytest.fixture(scope="module")
def desk_operator() -> RadonOperator:
    return RadonOperator(64, 180)


@pytest.mark.parametrize("regime", ["decreasing", "fixed"])
@pytest.mark.parametrize("p", [1.5, 4.0 / 3.0, 2.0])
def test_fitted_rate_matches_regime(desk_operator: RadonOperator, p: float, regime: str) -> None:
    pen = penalty_for(p, desk_operator.side)
    sc = project_to_source_condition(plant(64), desk_operator, pen, rng=RngSeed(20210))
    plan = build_plan(p, regime, sc, desk_operator, DESK_N_VALUES, 10, seed=20210)
    result = run_sweep(plan, workers=4)

    low, high = EXPECTED_BETA[regime]
    assert low <= result.fit.beta <= high
    assert result.stats.failed == 0

    converged = result.records[result.records["converged"]]
    assert converged["apriori_ok"].all()
