"""Tests for the weighted p-homogeneous penalty."""

from __future__ import annotations

import numpy as np
import pytest

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.models.entities import Image
from randtomo.operators.wavelet import AnalysisTransform
from randtomo.regularization.penalty import (
    Penalty,
    besov_weights,
    bregman,
    critical_smoothness,
    eval_R,
    eval_R_star,
    prox,
    subgradient,
)


def _scalar(p: float) -> Penalty:
    return Penalty(p, AnalysisTransform.identity(1))


def _flat(p: float, values: list[float]) -> tuple[Penalty, Image]:
    side = int(np.sqrt(len(values)))
    return Penalty(p, AnalysisTransform.identity(side)), Image(values, side)


def test_eval_R_hand_values() -> None:
    pen = Penalty.tikhonov(2)
    assert eval_R(pen, Image.zeros(2)) == 0.0
    assert eval_R(pen, Image([3.0, 4.0, 0.0, 0.0], 2)) == pytest.approx(12.5)
    assert eval_R(_scalar(1.5), Image([1.0], 1)) == pytest.approx(2.0 / 3.0)


def test_eval_R_star_hand_values() -> None:
    pen = Penalty.tikhonov(2)
    assert eval_R_star(pen, np.zeros(4)) == 0.0
    assert eval_R_star(pen, np.array([1.0, 1.0, 0.0, 0.0])) == pytest.approx(1.0)


def test_subgradient_hand_values(rng: np.random.Generator) -> None:
    pen = Penalty.tikhonov(3)
    f = Image(rng.standard_normal(9), 3)
    np.testing.assert_allclose(subgradient(pen, f).data, f.data)
    assert subgradient(_scalar(1.5), Image([4.0], 1)).data[0] == pytest.approx(2.0)


@pytest.mark.parametrize("p", [1.5, 4.0 / 3.0, 1.7, 2.0])
def test_euler_identity_and_fenchel_young(p: float, rng: np.random.Generator) -> None:
    pen = Penalty.besov(p, 8)
    f = Image(rng.standard_normal(64), 8)
    r = pen.subgradient(f)
    assert np.dot(r.data, f.data) == pytest.approx(p * pen.eval_R(f), rel=1e-10)
    assert pen.fenchel_young_gap(f, r.image) == pytest.approx(0.0, abs=1e-10 * pen.eval_R(f))
    other = Image(rng.standard_normal(64), 8)
    assert pen.fenchel_young_gap(f, other) >= 0.0


@pytest.mark.parametrize("p", [4.0 / 3.0, 1.5, 2.0])
@pytest.mark.parametrize("t", [0.5, 3.0])
def test_R_is_p_homogeneous(p: float, t: float, rng: np.random.Generator) -> None:
    pen = Penalty.besov(p, 8)
    f = Image(rng.standard_normal(64), 8)
    scaled = Image(t * f.data, 8)
    assert pen.eval_R(scaled) == pytest.approx(t**p * pen.eval_R(f), rel=1e-12)


def test_bregman_hand_values() -> None:
    pen = Penalty.tikhonov(1)
    assert bregman(pen, Image([1.0], 1), Image([1.0], 1)) == 0.0
    pen2, f = _flat(2.0, [1.0, 0.0, 0.0, 0.0])
    g = Image([0.0, 1.0, 0.0, 0.0], 2)
    assert bregman(pen2, f, g) == pytest.approx(2.0)
    assert bregman(_scalar(1.5), Image([4.0], 1), Image([1.0], 1)) == pytest.approx(3.0)


@pytest.mark.parametrize("p", [1.5, 4.0 / 3.0, 1.7, 2.0])
def test_bregman_symmetric_and_nonnegative(p: float, rng: np.random.Generator) -> None:
    pen = Penalty.besov(p, 8)
    for _ in range(10):
        f = Image(rng.standard_normal(64), 8)
        g = Image(rng.standard_normal(64), 8)
        d = pen.bregman(f, g)
        assert d >= 0.0
        assert d == pytest.approx(pen.bregman(g, f), rel=1e-12)


def test_tikhonov_bregman_is_twice_R_of_difference(rng: np.random.Generator) -> None:
    pen = Penalty.tikhonov(4)
    f = Image(rng.standard_normal(16), 4)
    g = Image(rng.standard_normal(16), 4)
    diff = Image(f.data - g.data, 4)
    assert pen.bregman(f, g) == pytest.approx(2.0 * pen.eval_R(diff), rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 4.0 / 3.0, 1.7])
def test_inverse_subgradient_round_trip(p: float, rng: np.random.Generator) -> None:
    pen = Penalty.besov(p, 8, s=0.7)
    r = rng.standard_normal(64)
    f = pen.inverse_subgradient(r)
    np.testing.assert_allclose(pen.subgradient(f).data, r, atol=1e-12)


def test_bregman_lower_bound_constant_is_positive(rng: np.random.Generator) -> None:
    # D(f, g) >= c ||f - g||^2 / (||f|| + ||g||)^(2 - p) on a bounded set for p < 2
    pen = Penalty(1.5, AnalysisTransform.identity(4))
    ratios = []
    for _ in range(200):
        f = Image(rng.standard_normal(16), 4)
        g = Image(rng.standard_normal(16), 4)
        spread = np.linalg.norm(f.data - g.data) ** 2
        scale = (np.linalg.norm(f.data) + np.linalg.norm(g.data)) ** (2 - pen.p)
        ratios.append(pen.bregman(f, g) * scale / spread)
    assert min(ratios) > 0.0


def test_besov_weights() -> None:
    levels = np.array([0, 1, 2, 3])
    np.testing.assert_allclose(besov_weights(1.5, critical_smoothness(1.5), 2, levels), 1.0)
    np.testing.assert_allclose(besov_weights(2.0, 0.0, 2, levels), 1.0)
    assert besov_weights(2.0, 1.0, 2, np.array([1]))[0] == pytest.approx(4.0)
    with pytest.raises(InvalidArgumentError):
        besov_weights(1.5, 0.5, 0, levels)


def test_critical_besov_penalty_has_unit_weights() -> None:
    pen = Penalty.besov(1.5, 8)
    assert pen.smoothness == pytest.approx(critical_smoothness(1.5))
    np.testing.assert_allclose(pen.weights, 1.0)
    assert not pen.weights.flags.writeable


def test_weighted_prox_scales_per_component() -> None:
    pen = Penalty(2.0, AnalysisTransform.identity(1), weights=np.array([3.0]))
    assert prox(pen, np.array([4.0]), 1.0)[0] == pytest.approx(1.0)


def test_weight_and_shape_validation() -> None:
    t = AnalysisTransform.identity(2)
    with pytest.raises(DimensionError):
        Penalty(1.5, t, weights=np.ones(3))
    with pytest.raises(InvalidArgumentError):
        Penalty(1.5, t, weights=np.array([1.0, 0.0, 1.0, 1.0]))
    with pytest.raises(InvalidArgumentError):
        Penalty(0.9, t)
    pen = Penalty(1.5, t)
    with pytest.raises(DimensionError):
        pen.eval_R(Image.zeros(3))
    with pytest.raises(InvalidArgumentError):
        pen.prox(np.ones(4), 0.0)
