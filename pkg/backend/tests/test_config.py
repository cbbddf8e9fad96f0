"""Tests for settings loading and precedence."""

from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from randtomo.core.config import DESK_N_VALUES, PAPER_SCALE, Settings, get_settings


def test_defaults_are_desk_scale(tmp_path: Path) -> None:
    settings = Settings.from_yaml()
    assert settings.side == 64
    assert settings.n_theta == 180
    assert settings.n_values == list(DESK_N_VALUES)
    assert settings.realizations == 10
    assert settings.output_dir == tmp_path / "runs"


def test_yaml_is_flattened_and_env_overrides(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    config = tmp_path / "config.yaml"
    config.write_text(
        "geometry:\n  side: 32\n  n_theta: 90\n"
        "experiment:\n  p: 2.0\n  regime: fixed\n  n_values: [10, 20, 30]\n"
        "solver:\n  bb_variant: BB2\n"
        "runtime:\n  workers: 2\n",
        encoding="utf-8",
    )
    monkeypatch.setenv("RANDTOMO_WORKERS", "3")
    settings = Settings.from_yaml(config)
    assert (settings.side, settings.n_theta) == (32, 90)
    assert settings.p == 2.0
    assert settings.regime == "fixed"
    assert settings.n_values == [10, 20, 30]
    assert settings.bb_variant == "BB2"
    assert settings.workers == 3


def test_overrides_beat_file_and_skip_none(tmp_path: Path) -> None:
    config = tmp_path / "config.yaml"
    config.write_text("experiment:\n  realizations: 4\n  seed: 7\n", encoding="utf-8")
    settings = Settings.from_yaml(config, overrides={"realizations": 2, "seed": None})
    assert settings.realizations == 2
    assert settings.seed == 7


def test_comma_separated_lists() -> None:
    settings = Settings.from_yaml(overrides={"n_values": "5, 10,20", "c_alpha_grid": "0.1,0.2"})
    assert settings.n_values == [5, 10, 20]
    assert settings.c_alpha_grid == [0.1, 0.2]


def test_paper_scale_switches_geometry() -> None:
    settings = Settings.from_yaml(overrides={"paper_scale": True})
    assert settings.side == PAPER_SCALE["side"]
    assert settings.n_theta == PAPER_SCALE["n_theta"]
    assert settings.n_values[0] == 36
    assert settings.realizations == 30


@pytest.mark.parametrize(
    "overrides",
    [
        {"p": 1.0},
        {"p": 2.5},
        {"regime": "shrinking"},
        {"n_values": [20, 10]},
        {"n_values": [10, 500]},
        {"workers": 0},
    ],
)
def test_invalid_values_raise_validation_error(overrides: dict) -> None:
    with pytest.raises(ValidationError):
        Settings.from_yaml(overrides=overrides)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        Settings.from_yaml(tmp_path / "nope.yaml")


def test_get_settings_is_cached() -> None:
    assert get_settings() is get_settings()


def test_default_sweep_shrinks_to_small_grid() -> None:
    assert Settings.from_yaml(overrides={"n_theta": 40}).n_values == [18, 25, 32, 40]
    assert Settings.from_yaml(overrides={"n_theta": 12}).n_values == [12]
    explicit = Settings.from_yaml(overrides={"n_theta": 40, "n_values": "5,10"})
    assert explicit.n_values == [5, 10]
