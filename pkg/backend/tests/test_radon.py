"""Tests for the discrete Radon transform and its adjoint."""

from __future__ import annotations

import math

import numpy as np
import pytest

from randtomo.core.errors import DimensionError, InvalidArgumentError
from randtomo.experiments.diagnostics import adjoint_mismatch, mass_mismatch
from randtomo.models.entities import AngleSet, Image, SinogramBlock
from randtomo.operators.radon import (
    RadonOperator,
    as_operator,
    default_detector_count,
    estimate_op_norm,
    radon_adjoint,
    radon_apply,
)
from randtomo.phantoms.builtin import plant


def test_detector_count_covers_diagonal() -> None:
    op = RadonOperator(16, 8)
    assert op.n_dtc == default_detector_count(16) >= 16 * math.sqrt(2)
    with pytest.raises(InvalidArgumentError):
        RadonOperator(16, 8, n_dtc=10)


def test_zero_image_and_zero_sinogram(tiny_radon: RadonOperator) -> None:
    assert not np.any(tiny_radon.apply(Image.zeros(8)).data)
    empty = SinogramBlock(np.zeros(tiny_radon.n_theta * tiny_radon.n_dtc), 12, tiny_radon.n_dtc)
    assert not np.any(tiny_radon.adjoint(empty).data)


def test_axis_aligned_symmetry(rng: np.random.Generator) -> None:
    op = RadonOperator(8, 12)
    f = rng.random((8, 8))
    at_zero = op.apply(Image.from_array(f)).matrix[0]
    transposed_at_ninety = op.apply(Image.from_array(f.T)).matrix[6]
    np.testing.assert_allclose(at_zero, transposed_at_ninety, atol=1e-10)


def test_opposite_angles_mirror_the_detector(rng: np.random.Generator) -> None:
    op = RadonOperator(8, 12)
    f = Image(rng.random(64), 8)
    theta = 0.37
    both = op._project_thetas(f, np.array([theta, theta + np.pi]))
    np.testing.assert_allclose(both[1], both[0][::-1], atol=1e-10)


def test_mass_preservation_on_interior_phantom() -> None:
    op = RadonOperator(32, 45)
    assert mass_mismatch(op, plant(32, seed=1)) < 1e-6


def test_adjoint_identity(
    tiny_radon: RadonOperator, rng: np.random.Generator
) -> None:
    assert adjoint_mismatch(tiny_radon, trials=20, seed=3) < 1e-8
    sub = tiny_radon.subsample(AngleSet((0, 5, 7), 12))
    assert adjoint_mismatch(sub, trials=20, seed=4) < 1e-8

    f = Image(rng.standard_normal(64), 8)
    g = SinogramBlock(rng.standard_normal(12 * tiny_radon.n_dtc), 12, tiny_radon.n_dtc)
    lhs = float(np.dot(radon_apply(tiny_radon, f).data, g.data))
    rhs = float(np.dot(f.data, radon_adjoint(tiny_radon, g).data))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_adjoint_matches_dense_transpose(
    tiny_radon: RadonOperator, rng: np.random.Generator
) -> None:
    dense = tiny_radon.to_dense()
    g = rng.standard_normal(dense.shape[0])
    block = SinogramBlock(g, tiny_radon.n_theta, tiny_radon.n_dtc)
    np.testing.assert_allclose(tiny_radon.adjoint(block).data, dense.T @ g, atol=1e-12)
    f = rng.standard_normal(64)
    np.testing.assert_allclose(tiny_radon.apply(Image(f, 8)).data, dense @ f, atol=1e-12)


def test_backprojection_of_delta_peaks_at_delta(tiny_radon: RadonOperator) -> None:
    delta = np.zeros(64)
    delta[3 * 8 + 5] = 1.0
    back = tiny_radon.adjoint(tiny_radon.apply(Image(delta, 8))).data
    assert np.all(back >= 0.0)
    assert int(np.argmax(back)) == 3 * 8 + 5


def test_subsample_full_and_singleton(
    tiny_radon: RadonOperator, rng: np.random.Generator
) -> None:
    f = Image(rng.standard_normal(64), 8)
    full = tiny_radon.subsample(AngleSet.full(12))
    np.testing.assert_array_equal(full.apply(f).data, tiny_radon.apply(f).data)
    single = tiny_radon.subsample(AngleSet((4,), 12))
    np.testing.assert_allclose(single.apply(f).data, tiny_radon.angle_block(4) @ f.data, atol=1e-12)
    np.testing.assert_allclose(single.apply(f).data, tiny_radon.apply(f).matrix[4], atol=1e-12)


def test_subsample_rejects_foreign_grid(tiny_radon: RadonOperator) -> None:
    with pytest.raises(InvalidArgumentError):
        tiny_radon.subsample(AngleSet((0, 1), 13))


def test_shape_mismatches_raise(tiny_radon: RadonOperator) -> None:
    with pytest.raises(DimensionError):
        tiny_radon.apply(Image.zeros(4))
    with pytest.raises(DimensionError):
        tiny_radon.adjoint(SinogramBlock(np.zeros(3 * tiny_radon.n_dtc), 3, tiny_radon.n_dtc))


def test_linear_operator_matches_dense(
    tiny_radon: RadonOperator, rng: np.random.Generator
) -> None:
    linear, n_samples = as_operator(tiny_radon)
    assert n_samples == 12
    f = rng.standard_normal(64)
    np.testing.assert_allclose(linear.matvec(f), tiny_radon.to_dense() @ f, atol=1e-12)


def test_plan_without_cache_matches(
    monkeypatch: pytest.MonkeyPatch, rng: np.random.Generator
) -> None:
    from randtomo.operators import radon

    f = Image(rng.standard_normal(64), 8)
    cached = RadonOperator(8, 40).apply(f).data
    monkeypatch.setattr(radon, "_PLAN_CACHE_LIMIT", 0)
    streamed = RadonOperator(8, 40).apply(f).data
    np.testing.assert_allclose(streamed, cached, atol=1e-12)


def test_estimate_op_norm_oracles(rng: np.random.Generator) -> None:
    assert estimate_op_norm(np.eye(5)) == pytest.approx(1.0, rel=1e-10)
    assert estimate_op_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-8)
    matrix = rng.standard_normal((10, 10))
    expected = np.linalg.svd(matrix, compute_uv=False)[0]
    assert estimate_op_norm(matrix) == pytest.approx(expected, rel=1e-4)


def test_per_angle_bound_dominates_averaged_norm(tiny_radon: RadonOperator) -> None:
    averaged = tiny_radon.norm_estimate / math.sqrt(tiny_radon.n_theta)
    assert averaged <= tiny_radon.per_angle_norm_bound * (1.0 + 1e-8)
    dense_block = tiny_radon.angle_block(0)
    assert tiny_radon.per_angle_norm_bound >= np.linalg.norm(dense_block, 2) * (1.0 - 1e-10)


def test_subsampled_norm_never_exceeds_full(tiny_radon: RadonOperator) -> None:
    full = estimate_op_norm(tiny_radon)
    rng = np.random.default_rng(91)
    subsets = [(7,)] + [
        tuple(rng.choice(12, size=int(rng.integers(2, 12)), replace=False).tolist())
        for _ in range(6)
    ]
    for indices in subsets:
        sub = tiny_radon.subsample(AngleSet(indices, 12))
        assert estimate_op_norm(sub) <= full * (1.0 + 1e-3)
