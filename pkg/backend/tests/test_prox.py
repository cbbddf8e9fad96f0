"""Tests for the componentwise proximal map."""

from __future__ import annotations

import numpy as np
import pytest

from randtomo.core.errors import InvalidArgumentError
from randtomo.regularization.prox import check_exponent, prox_power, signed_power


def _bisection(x: float, scale: float, p: float) -> float:
    a = abs(x)
    lo, hi = 0.0, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid + scale * mid ** (p - 1.0) < a:
            lo = mid
        else:
            hi = mid
    return float(np.sign(x)) * 0.5 * (lo + hi)


def test_signed_power_values(rng: np.random.Generator) -> None:
    assert signed_power(-4.0, 0.5) == pytest.approx(-2.0)
    x = rng.standard_normal(50)
    np.testing.assert_array_equal(signed_power(x, 1.0), x)
    np.testing.assert_allclose(signed_power(signed_power(x, 0.5), 2.0), x, rtol=1e-12, atol=1e-15)
    with pytest.raises(InvalidArgumentError):
        signed_power(x, 0.0)


@pytest.mark.parametrize(
    ("p", "scale", "x", "expected"),
    [
        (2.0, 1.0, 4.0, 2.0),
        (1.5, 1.0, 2.0, 1.0),
        (4.0 / 3.0, 2.0, 3.0, 1.0),
        (1.5, 1.0, -2.0, -1.0),
    ],
)
def test_closed_forms(p: float, scale: float, x: float, expected: float) -> None:
    assert prox_power(np.array([x]), scale, p)[0] == pytest.approx(expected, abs=1e-14)


def test_general_exponent_matches_bisection() -> None:
    result = prox_power(np.array([1.3]), 0.5, 1.7)[0]
    assert result == pytest.approx(_bisection(1.3, 0.5, 1.7), abs=1e-12)


def test_zero_input_and_sign() -> None:
    out = prox_power(np.array([0.0, -1.0, 1.0]), 0.3, 1.5)
    assert out[0] == 0.0
    assert out[1] == pytest.approx(-out[2])
    assert 0.0 < out[2] < 1.0


@pytest.mark.parametrize("p", [2.0, 1.5, 4.0 / 3.0, 1.7])
def test_optimality_residual_on_random_triples(p: float) -> None:
    rng = np.random.default_rng(int(p * 1000))
    x = rng.standard_normal(2500) * 10.0 ** rng.uniform(-3, 3, 2500)
    scale = 10.0 ** rng.uniform(-3, 3, 2500)
    z = prox_power(x, scale, p)
    magnitude = np.abs(z)
    residual = magnitude + scale * magnitude ** (p - 1.0) - np.abs(x)
    assert np.all(np.abs(residual) <= 1e-12 * np.maximum(1.0, np.abs(x)))
    assert np.all(np.sign(z) == np.sign(x))


@pytest.mark.parametrize("p", [1.5, 4.0 / 3.0])
def test_closed_forms_agree_with_bisection(p: float) -> None:
    rng = np.random.default_rng(17)
    x = rng.uniform(-5.0, 5.0, 200)
    scale = rng.uniform(0.01, 3.0, 200)
    z = prox_power(x, scale, p)
    oracle = np.array([_bisection(xi, si, p) for xi, si in zip(x, scale)])
    np.testing.assert_allclose(z, oracle, atol=1e-12)


def test_prox_is_minimizer_of_scalar_objective() -> None:
    x, scale, p = 0.8, 0.4, 1.5
    z = prox_power(np.array([x]), scale, p)[0]
    grid = np.linspace(-1.0, 1.0, 20001)
    values = 0.5 * (grid - x) ** 2 + scale / p * np.abs(grid) ** p
    assert abs(grid[np.argmin(values)] - z) < 2e-4


def test_rejects_bad_scale_and_exponent() -> None:
    with pytest.raises(InvalidArgumentError):
        prox_power(np.ones(2), 0.0, 1.5)
    with pytest.raises(InvalidArgumentError):
        prox_power(np.ones(2), np.array([1.0, -1.0]), 1.5)
    with pytest.raises(InvalidArgumentError):
        check_exponent(1.0)
    with pytest.raises(InvalidArgumentError):
        check_exponent(2.5)


@pytest.mark.parametrize("p", [4.0 / 3.0, 1.5, 1.7, 2.0])
def test_prox_is_monotone(p: float) -> None:
    z = prox_power(np.linspace(-5.0, 5.0, 1001), 0.7, p)
    assert np.all(np.diff(z) >= 0.0)
