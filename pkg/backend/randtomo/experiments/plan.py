"""Noise regimes, regularization schedules and the sweep plan built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

from randtomo.core.errors import InvalidArgumentError
from randtomo.models.dto import SolverConfig
from randtomo.models.entities import RngSeed
from randtomo.operators.radon import RadonOperator
from randtomo.phantoms.source_condition import SourceConditionResult
from randtomo.regularization.penalty import Penalty

Regime = Literal["fixed", "decreasing"]
REGIMES: tuple[Regime, ...] = ("fixed", "decreasing")

ALPHA_EXPONENTS: dict[str, float] = {"fixed": -1.0 / 3.0, "decreasing": -1.0}

# Heuristically tuned c_α per (regime, p).
C_ALPHA_TABLE: dict[str, dict[float, float]] = {
    "fixed": {1.5: 0.010, 4.0 / 3.0: 0.030, 2.0: 0.015},
    "decreasing": {1.5: 0.3, 4.0 / 3.0: 0.3, 2.0: 0.5},
}

FIXED_NOISE_FACTOR = 0.01
DECREASING_NOISE_FACTOR = 0.02


def _check_regime(kind: str) -> None:
    if kind not in REGIMES:
        raise InvalidArgumentError(f"regime must be one of {REGIMES}, got {kind!r}")


def default_c_alpha(p: float, regime: str) -> float:
    """Tabulated c_α for the nearest tabulated exponent."""
    _check_regime(regime)
    table = C_ALPHA_TABLE[regime]
    nearest = min(table, key=lambda tabulated: abs(tabulated - p))
    return table[nearest]


def default_noise_factor(regime: str, n0: int) -> float:
    """Noise constant relative to ||A f†||_∞; the decreasing regime scales with the first N."""
    _check_regime(regime)
    return FIXED_NOISE_FACTOR if regime == "fixed" else DECREASING_NOISE_FACTOR * n0


@dataclass(frozen=True, slots=True)
class NoiseRegime:
    """δ(N) = c_δ (fixed) or c_δ / N (decreasing), with c_δ = factor * ||A f†||_∞."""

    kind: Regime
    c_delta_factor: float
    data_scale: float = 1.0

    def __post_init__(self) -> None:
        _check_regime(self.kind)
        if not self.c_delta_factor > 0 or not self.data_scale > 0:
            raise InvalidArgumentError("noise factor and data scale must be positive")

    @property
    def c_delta(self) -> float:
        return self.c_delta_factor * self.data_scale

    def delta(self, n: int) -> float:
        return self.c_delta if self.kind == "fixed" else self.c_delta / n


@dataclass(frozen=True, slots=True)
class AlphaSchedule:
    """α(N) = c_α N^exponent."""

    c_alpha: float
    exponent: float

    def __post_init__(self) -> None:
        if not self.c_alpha > 0:
            raise InvalidArgumentError(f"c_alpha must be positive, got {self.c_alpha}")

    @classmethod
    def for_regime(cls, regime: str, c_alpha: float) -> "AlphaSchedule":
        _check_regime(regime)
        return cls(c_alpha, ALPHA_EXPONENTS[regime])

    def alpha(self, n: int) -> float:
        return self.c_alpha * float(n) ** self.exponent


def penalty_for(p: float, side: int) -> Penalty:
    """Tikhonov for p = 2, otherwise the Haar ℓ_p penalty at critical Besov smoothness."""
    if math.isclose(p, 2.0):
        return Penalty.tikhonov(side)
    return Penalty.besov(p, side)


@dataclass(frozen=True)
class ExperimentPlan:
    p: float
    regime: NoiseRegime
    schedule: AlphaSchedule
    n_values: tuple[int, ...]
    realizations: int
    phantom: SourceConditionResult
    base_seed: RngSeed
    n_theta: int
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        values = tuple(int(n) for n in self.n_values)
        if not values:
            raise InvalidArgumentError("n_values must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InvalidArgumentError(f"n_values must be strictly increasing, got {values}")
        if values[0] < 1 or values[-1] > self.n_theta:
            raise InvalidArgumentError(f"n_values must lie in [1, {self.n_theta}], got {values}")
        if self.realizations < 1:
            raise InvalidArgumentError(f"realizations must be >= 1, got {self.realizations}")
        object.__setattr__(self, "n_values", values)

    @property
    def side(self) -> int:
        return self.phantom.f_dagger.side

    @property
    def penalty(self) -> Penalty:
        return penalty_for(self.p, self.side)

    def with_c_alpha(self, c_alpha: float) -> "ExperimentPlan":
        return replace(self, schedule=AlphaSchedule(c_alpha, self.schedule.exponent))


def build_plan(
    p: float,
    regime: str,
    phantom: SourceConditionResult,
    op: RadonOperator,
    n_values: tuple[int, ...],
    realizations: int,
    seed: int,
    c_alpha: float | None = None,
    c_delta: float | None = None,
    solver: SolverConfig | None = None,
) -> ExperimentPlan:
    """Resolve tabulated defaults and the data scale ||A f†||_∞ on the full angle grid."""
    _check_regime(regime)
    if not n_values:
        raise InvalidArgumentError("n_values must not be empty")
    factor = c_delta if c_delta is not None else default_noise_factor(regime, n_values[0])
    scale = op.apply(phantom.f_dagger).sup_norm()
    return ExperimentPlan(
        p=p,
        regime=NoiseRegime(regime, factor, scale),  # type: ignore[arg-type]
        schedule=AlphaSchedule.for_regime(
            regime, c_alpha if c_alpha is not None else default_c_alpha(p, regime)
        ),
        n_values=tuple(n_values),
        realizations=realizations,
        phantom=phantom,
        base_seed=RngSeed(seed),
        n_theta=op.n_theta,
        solver=solver or SolverConfig(),
    )


__all__ = [
    "ALPHA_EXPONENTS",
    "AlphaSchedule",
    "C_ALPHA_TABLE",
    "ExperimentPlan",
    "NoiseRegime",
    "REGIMES",
    "build_plan",
    "Regime",
    "default_c_alpha",
    "default_noise_factor",
    "penalty_for",
]
