"""Pydantic models for solver settings and run provenance."""

from __future__ import annotations

from datetime import datetime
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SolverConfig(BaseModel):
    """Stopping and step-size settings of the proximal gradient solver.

    Step bounds left as ``None`` are resolved per operator: ``tau_init`` becomes
    ``N / ||A_θ||²`` and the safeguards ``1e-8`` and ``1e8`` times that.
    """

    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(default=2000, ge=1)
    rel_tol: float = Field(default=1e-7, gt=0)
    obj_tol: float = Field(default=1e-12, gt=0)
    tau_init: float | None = Field(default=None, gt=0)
    tau_min: float | None = Field(default=None, gt=0)
    tau_max: float | None = Field(default=None, gt=0)
    bb_variant: Literal["BB1", "BB2"] = "BB1"
    memory: int = Field(default=10, ge=1, description="Window of the non-monotone acceptance test")
    stall_window: int = Field(default=5, ge=1)
    divergence_factor: float = Field(default=1e6, gt=1)
    trace: bool = False

    @model_validator(mode="after")
    def _check_bounds(self) -> "SolverConfig":
        if self.tau_init is not None:
            low = self.tau_min if self.tau_min is not None else self.tau_init
            high = self.tau_max if self.tau_max is not None else self.tau_init
            if not low <= self.tau_init <= high:
                raise ValueError("step bounds must satisfy tau_min <= tau_init <= tau_max")
        elif self.tau_min is not None and self.tau_max is not None and self.tau_min > self.tau_max:
            raise ValueError("tau_min must not exceed tau_max")
        return self

    def step_bounds(self, default_tau: float) -> tuple[float, float, float]:
        """Resolved ``(tau_init, tau_min, tau_max)``."""
        tau_init = self.tau_init if self.tau_init is not None else default_tau
        tau_min = self.tau_min if self.tau_min is not None else 1e-8 * tau_init
        tau_max = self.tau_max if self.tau_max is not None else 1e8 * tau_init
        tau_min = min(tau_min, tau_init)
        tau_max = max(tau_max, tau_init)
        return tau_init, tau_min, tau_max


class Manifest(BaseModel):
    """Provenance written next to every command's outputs."""

    run_id: str
    command: str
    created_at: datetime
    settings: dict[str, Any]
    seeds: dict[str, Any] = Field(default_factory=dict)
    versions: dict[str, str] = Field(default_factory=dict)
    inputs: dict[str, str] = Field(default_factory=dict, description="Input path -> SHA-256")
    outputs: list[str] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict, description="Headline results")


__all__ = ["Manifest", "SolverConfig"]
