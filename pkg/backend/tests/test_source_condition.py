"""Tests for phantoms and the source-condition projection."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from randtomo.core.errors import InvalidArgumentError
from randtomo.models.entities import Image, RngSeed, SinogramBlock
from randtomo.operators.radon import RadonOperator
from randtomo.phantoms import builtin_phantom, load_phantom
from randtomo.phantoms.builtin import plant, shepp_logan
from randtomo.phantoms.source_condition import default_lambda, project_to_source_condition
from randtomo.regularization.penalty import Penalty
from randtomo.utils.io import write_matrix_csv


@pytest.mark.parametrize("factory", [plant, shepp_logan])
def test_builtin_phantoms_are_interior_supported(factory) -> None:
    image = factory(32, seed=3).array
    coords = (np.arange(32) - 15.5) / 16.0
    x, y = np.meshgrid(coords, coords)
    assert np.all(image[x**2 + y**2 > 0.95**2] == 0.0)
    assert image.max() > 0.0


def test_plant_is_seeded() -> None:
    np.testing.assert_array_equal(plant(16, seed=4).data, plant(16, seed=4).data)
    assert not np.array_equal(plant(16, seed=4).data, plant(16, seed=5).data)


def test_unknown_phantom_name() -> None:
    with pytest.raises(InvalidArgumentError):
        builtin_phantom("teapot", 16)


def test_load_phantom_from_csv_resamples(tmp_path: Path) -> None:
    path = write_matrix_csv(tmp_path / "square.csv", np.ones((32, 32)))
    image = load_phantom(str(path), 16)
    assert image.side == 16
    np.testing.assert_allclose(image.data, 1.0, rtol=1e-6)
    with pytest.raises(FileNotFoundError):
        load_phantom(str(tmp_path / "missing.csv"), 16)


@pytest.mark.parametrize("p", [2.0, 1.5, 4.0 / 3.0])
def test_projection_satisfies_source_condition(p: float) -> None:
    op = RadonOperator(16, 24)
    pen = Penalty.tikhonov(16) if p == 2.0 else Penalty.besov(p, 16)
    result = project_to_source_condition(plant(16, seed=1), op, pen, rng=RngSeed(1))
    assert result.sc_residual <= 1e-8 * result.atw_norm
    assert result.rel_change >= 0.0
    info = result.provenance(pen)
    assert info["sc_residual_relative"] <= 1e-8
    assert info["lambda_sc"] == pytest.approx(result.lambda_sc)
    assert result.w.n_angles == 24


def test_reconstruction_from_any_w_is_exact(
    small_radon: RadonOperator, rng: np.random.Generator
) -> None:
    pen = Penalty.besov(1.5, 16)
    w = SinogramBlock(rng.standard_normal(24 * small_radon.n_dtc), 24, small_radon.n_dtc)
    atw = small_radon.adjoint(w).data
    f = pen.inverse_subgradient(atw)
    np.testing.assert_allclose(pen.subgradient(f).data, atw, atol=1e-12 * np.abs(atw).max())


def test_range_element_is_recovered_for_small_ridge(rng: np.random.Generator) -> None:
    op = RadonOperator(4, 8)
    pen = Penalty.tikhonov(4)
    w0 = SinogramBlock(rng.standard_normal(8 * op.n_dtc), 8, op.n_dtc)
    f0 = op.adjoint(w0)
    result = project_to_source_condition(f0, op, pen, lambda_sc=1e-10, tol=1e-12)
    assert result.rel_change < 1e-4


def test_smaller_ridge_moves_phantom_less() -> None:
    op = RadonOperator(32, 48)
    pen = Penalty.besov(1.5, 32)
    scale = op.norm_estimate**2
    f0 = plant(32, seed=1)
    changes = [
        project_to_source_condition(f0, op, pen, factor * scale, rng=RngSeed(1)).rel_change
        for factor in (1e-1, 1e-2, 1e-3)
    ]
    assert changes[1] <= changes[0]
    assert changes[2] <= changes[1]


def test_default_lambda_and_validation(tiny_radon: RadonOperator) -> None:
    lam = default_lambda(tiny_radon)
    assert lam == pytest.approx(1e-3 * tiny_radon.norm_estimate**2, rel=1e-6)
    with pytest.raises(InvalidArgumentError):
        project_to_source_condition(Image.zeros(8), tiny_radon, Penalty.besov(1.5, 8), -1.0)


@pytest.mark.slow
def test_desk_scale_plant_changes_moderately() -> None:
    op = RadonOperator(64, 180)
    pen = Penalty.besov(1.5, 64)
    result = project_to_source_condition(plant(64), op, pen, rng=RngSeed(20210))
    assert result.sc_residual <= 1e-8 * result.atw_norm
    assert result.rel_change <= 0.15
