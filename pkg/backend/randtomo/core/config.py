"""Run configuration: YAML file, RANDTOMO_ environment overlay and CLI overrides."""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Mapping

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

ENV_PREFIX = "RANDTOMO_"
DEFAULT_CONFIG_PATH = Path("~/.config/randtomo/config.yaml")

DESK_N_VALUES = (18, 25, 32, 40, 50, 64, 81)
PAPER_SCALE: Mapping[str, Any] = {
    "side": 128,
    "n_theta": 360,
    "n_values": [36 + 14 * k for k in range(10)],
    "realizations": 30,
}

_YAML_KEY_MAP: Mapping[tuple[str, ...], str] = {
    ("output", "dir"): "output_dir",
    ("runtime", "workers"): "workers",
    ("logging", "level"): "log_level",
    ("logging", "json"): "log_json",
    ("geometry", "side"): "side",
    ("geometry", "n_theta"): "n_theta",
    ("experiment", "p"): "p",
    ("experiment", "regime"): "regime",
    ("experiment", "c_alpha"): "c_alpha",
    ("experiment", "c_delta"): "c_delta",
    ("experiment", "n_values"): "n_values",
    ("experiment", "realizations"): "realizations",
    ("experiment", "seed"): "seed",
    ("experiment", "paper_scale"): "paper_scale",
    ("experiment", "failure_tolerance"): "failure_tolerance",
    ("phantom", "name"): "phantom",
    ("phantom", "lambda_sc"): "lambda_sc",
    ("phantom", "tol"): "sc_tol",
    ("phantom", "max_iters"): "sc_max_iters",
    ("solver", "rel_tol"): "rel_tol",
    ("solver", "obj_tol"): "obj_tol",
    ("solver", "max_iters"): "max_iters",
    ("solver", "bb_variant"): "bb_variant",
    ("experiment", "c_alpha_grid"): "c_alpha_grid",
    ("experiment", "tune_realizations"): "tune_realizations",
    ("diagnostics", "svd_cap"): "svd_cap",
    ("diagnostics", "side"): "diag_side",
    ("diagnostics", "n_theta"): "diag_n_theta",
}


class Settings(BaseModel):
    """Runtime configuration loaded from YAML file, environment variables and overrides."""

    output_dir: Path = Field(default=Path("runs"))
    workers: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    log_json: bool = True

    side: int = Field(default=64, ge=2)
    n_theta: int = Field(default=180, ge=1)

    p: float = Field(default=1.5, gt=1.0, le=2.0)
    regime: Literal["fixed", "decreasing"] = "decreasing"
    c_alpha: float | None = Field(default=None, gt=0.0)
    c_delta: float | None = Field(default=None, gt=0.0)
    n_values: list[int] = Field(default_factory=lambda: list(DESK_N_VALUES))
    realizations: int = Field(default=10, ge=1)
    seed: int = Field(default=20210, ge=0, lt=2**64)
    paper_scale: bool = False
    failure_tolerance: float = Field(default=0.05, ge=0.0, lt=1.0)

    phantom: str = "plant"
    lambda_sc: float | None = Field(default=None, gt=0.0)
    sc_tol: float = Field(default=1e-10, gt=0.0)
    sc_max_iters: int = Field(default=5000, ge=1)

    rel_tol: float = Field(default=1e-7, gt=0.0)
    obj_tol: float = Field(default=1e-12, gt=0.0)
    max_iters: int = Field(default=2000, ge=1)
    bb_variant: Literal["BB1", "BB2"] = "BB1"

    c_alpha_grid: list[float] | None = None
    tune_realizations: int = Field(default=3, ge=1)

    svd_cap: int = Field(default=4_000_000, ge=1)
    diag_side: int = Field(default=16, ge=2)
    diag_n_theta: int = Field(default=36, ge=1)

    model_config = {
        "validate_assignment": True,
        "extra": "ignore",
    }

    @field_validator("output_dir", mode="before")
    @classmethod
    def _expand_output_dir(cls, value: Any) -> Path:
        if isinstance(value, Path):
            return value.expanduser()
        if isinstance(value, str):
            return Path(value).expanduser()
        raise TypeError("output_dir must be a path or string")

    @field_validator("c_alpha_grid", mode="before")
    @classmethod
    def _split_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [float(part) for part in value.replace(" ", "").split(",") if part]
        return value

    @field_validator("n_values", mode="before")
    @classmethod
    def _split_n_values(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(part) for part in value.replace(" ", "").split(",") if part]
        return value

    @model_validator(mode="before")
    @classmethod
    def _apply_scale_defaults(cls, data: Any) -> Any:
        if not isinstance(data, Mapping):
            return data
        merged = dict(data)
        if _truthy(merged.get("paper_scale")):
            merged = {**PAPER_SCALE, **merged}
        # the default sweep shrinks to fit a smaller angle grid
        if "n_values" not in merged and "n_theta" in merged:
            n_theta = int(merged["n_theta"])
            fitting = [n for n in DESK_N_VALUES if n <= n_theta]
            merged["n_values"] = fitting or [n_theta]
        return merged

    @model_validator(mode="after")
    def _check_sweep(self) -> "Settings":
        values = self.n_values
        if not values:
            raise ValueError("n_values must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("n_values must be strictly increasing")
        if values[0] < 1 or values[-1] > self.n_theta:
            raise ValueError(f"n_values must lie in [1, n_theta={self.n_theta}]")
        return self

    @classmethod
    def from_yaml(
        cls,
        path: Path | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> "Settings":
        """Load YAML config, overlay env vars and explicit overrides; fall back to defaults."""
        config_path = cls._resolve_config_path(path)
        data: dict[str, Any] = {}
        if config_path is not None:
            if not config_path.exists():
                raise FileNotFoundError(f"Config file not found: {config_path}")
            with config_path.open("r", encoding="utf-8") as fh:
                raw = yaml.safe_load(fh) or {}
            data.update(_flatten_yaml(raw))
        data.update(_load_env_overrides())
        if overrides:
            data.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**data)

    @staticmethod
    def _resolve_config_path(path: Path | None) -> Path | None:
        if path is not None:
            return path.expanduser()
        env_path = os.environ.get(f"{ENV_PREFIX}CONFIG")
        if env_path:
            return Path(env_path).expanduser()
        resolved_default = DEFAULT_CONFIG_PATH.expanduser()
        return resolved_default if resolved_default.exists() else None


def _truthy(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in {"1", "true", "yes", "on"}
    return bool(value)


def _flatten_yaml(raw: Mapping[str, Any], prefix: tuple[str, ...] = ()) -> dict[str, Any]:
    """Flatten nested YAML configuration to Settings field names."""
    flat: dict[str, Any] = {}
    for key, value in raw.items():
        next_prefix = prefix + (key,)
        if isinstance(value, Mapping):
            flat.update(_flatten_yaml(value, prefix=next_prefix))
        else:
            mapped_key = _YAML_KEY_MAP.get(next_prefix)
            if mapped_key:
                flat[mapped_key] = value
            elif key in Settings.model_fields:
                flat[key] = value
    return flat


def _load_env_overrides() -> dict[str, Any]:
    """Map environment variables with RANDTOMO_ prefix into Settings fields."""
    overrides: dict[str, Any] = {}
    for key, value in os.environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        field_name = key[len(ENV_PREFIX) :].lower()
        if field_name in Settings.model_fields:
            overrides[field_name] = value
    return overrides


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Cached settings accessor."""
    return Settings.from_yaml()


__all__ = ["Settings", "get_settings", "PAPER_SCALE", "DESK_N_VALUES"]
