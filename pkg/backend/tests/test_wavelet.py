"""Tests for the orthonormal analysis transforms."""

from __future__ import annotations

import numpy as np
import pytest

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.models.entities import Image
from randtomo.operators.wavelet import AnalysisTransform, analysis, synthesis


def test_constant_two_by_two() -> None:
    t = AnalysisTransform.haar(2, levels=1)
    np.testing.assert_allclose(t.analysis(Image(np.ones(4), 2)), [2.0, 0.0, 0.0, 0.0], atol=1e-15)


def test_identity_returns_input(rng: np.random.Generator) -> None:
    f = Image(rng.standard_normal(9), 3)
    t = AnalysisTransform.identity(3)
    np.testing.assert_array_equal(t.analysis(f), f.data)
    np.testing.assert_array_equal(t.synthesis(f.data).data, f.data)


@pytest.mark.parametrize("levels", [1, 2, 3])
def test_parseval_and_round_trip(levels: int, rng: np.random.Generator) -> None:
    t = AnalysisTransform.haar(8, levels=levels)
    f = Image(rng.standard_normal(64), 8)
    c = analysis(t, f)
    assert np.linalg.norm(c) == pytest.approx(f.norm(), rel=1e-12)
    np.testing.assert_allclose(synthesis(t, c).data, f.data, atol=1e-12)


def test_inner_products_preserved(rng: np.random.Generator) -> None:
    t = AnalysisTransform.haar(16)
    f = rng.standard_normal(256)
    g = rng.standard_normal(256)
    assert np.dot(t.analysis(f), t.analysis(g)) == pytest.approx(np.dot(f, g), rel=1e-12)


def test_batched_analysis_matches_single(rng: np.random.Generator) -> None:
    t = AnalysisTransform.haar(8)
    batch = rng.standard_normal((3, 64))
    coeffs = t.analysis(batch)
    for row, c in zip(batch, coeffs):
        np.testing.assert_allclose(c, t.analysis(row), atol=1e-14)
    np.testing.assert_allclose(t.synthesis_array(coeffs), batch, atol=1e-12)


def test_zero_coefficients_give_zero_image() -> None:
    t = AnalysisTransform.haar(8)
    assert not np.any(t.synthesis(np.zeros(64)).data)


def test_coarsest_scaling_function_is_constant() -> None:
    t = AnalysisTransform.haar(8)
    c = np.zeros(64)
    c[0] = 1.0
    np.testing.assert_allclose(t.synthesis(c).data, np.full(64, 1.0 / 8.0), atol=1e-15)


def test_coefficient_levels_follow_mallat_layout() -> None:
    levels = AnalysisTransform.haar(8).coefficient_levels().reshape(8, 8)
    assert levels[0, 0] == 0
    assert levels[0, 1] == levels[1, 0] == levels[1, 1] == 0
    assert levels[2, 3] == 1
    assert levels[7, 0] == 2
    assert np.all(AnalysisTransform.identity(4).coefficient_levels() == 0)


def test_haar_rejects_non_power_of_two() -> None:
    with pytest.raises(InvalidArgumentError):
        AnalysisTransform.haar(12)
    with pytest.raises(InvalidArgumentError):
        AnalysisTransform("haar2d", 8, 4)


def test_shape_checks() -> None:
    t = AnalysisTransform.haar(4)
    with pytest.raises(DimensionError):
        t.analysis(np.zeros(15))
    with pytest.raises(DimensionError):
        analysis(t, Image.zeros(8))
