"""Procedural test phantoms, supported strictly inside the inscribed disc."""

from __future__ import annotations

from typing import Callable

import numpy as np

from randtomo.core.errors import InvalidArgumentError
from randtomo.models.entities import Image

# Modified Shepp-Logan: (value, semi-axis x, semi-axis y, centre x, centre y, rotation in degrees).
_SHEPP_LOGAN = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)

_SUPPORT_RADIUS = 0.95


def _grid(side: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel centres in [-1, 1]², ``y`` growing with the row index."""
    coords = (np.arange(side) - (side - 1) / 2.0) / (side / 2.0)
    return np.meshgrid(coords, coords, indexing="xy")


def _ellipse_radius(
    x: np.ndarray, y: np.ndarray, ax: float, ay: float, cx: float, cy: float, degrees: float
) -> np.ndarray:
    phi = np.deg2rad(degrees)
    u = (x - cx) * np.cos(phi) + (y - cy) * np.sin(phi)
    v = -(x - cx) * np.sin(phi) + (y - cy) * np.cos(phi)
    return np.sqrt((u / ax) ** 2 + (v / ay) ** 2)


def _support(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x**2 + y**2) <= _SUPPORT_RADIUS**2


def shepp_logan(side: int, seed: int = 0) -> Image:
    """Modified Shepp-Logan head phantom; ``seed`` is accepted for a uniform signature."""
    if side < 2:
        raise InvalidArgumentError(f"phantom side must be >= 2, got {side}")
    x, y = _grid(side)
    image = np.zeros((side, side))
    for value, ax, ay, cx, cy, degrees in _SHEPP_LOGAN:
        image[_ellipse_radius(x, y, ax, ay, cx, cy, degrees) <= 1.0] += value
    image[~_support(x, y)] = 0.0
    return Image.from_array(image)


def plant(side: int, seed: int = 0) -> Image:
    """Piecewise-smooth plant-like phantom: a smooth rosette of leaves over a sharp stem and pot.

    Leaf placement, size and intensity are drawn from ``seed``; the same seed always yields the
    same image.
    """
    if side < 2:
        raise InvalidArgumentError(f"phantom side must be >= 2, got {side}")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    x, y = _grid(side)
    image = np.zeros((side, side))

    # pot and stem with sharp edges
    image[(np.abs(x) <= 0.28) & (y >= 0.45) & (y <= 0.8)] += 0.6
    image[(np.abs(x) <= 0.04) & (y >= -0.1) & (y < 0.45)] += 0.8

    n_leaves = 7
    angles = np.sort(rng.uniform(-np.pi, 0.0, size=n_leaves))
    for angle in angles:
        length = rng.uniform(0.18, 0.32)
        width = rng.uniform(0.06, 0.11)
        distance = rng.uniform(0.25, 0.4)
        cx, cy = distance * np.cos(angle), -0.1 + distance * np.sin(angle)
        radius = _ellipse_radius(x, y, length, width, cx, cy, np.rad2deg(angle))
        bump = np.clip(1.0 - radius**2, 0.0, None) ** 2
        image += rng.uniform(0.5, 1.0) * bump

    image[~_support(x, y)] = 0.0
    return Image.from_array(image)


BUILTIN_PHANTOMS: dict[str, Callable[[int, int], Image]] = {
    "plant": plant,
    "shepp_logan": shepp_logan,
}


def builtin_phantom(name: str, side: int, seed: int = 0) -> Image:
    try:
        factory = BUILTIN_PHANTOMS[name]
    except KeyError as exc:
        known = ", ".join(sorted(BUILTIN_PHANTOMS))
        raise InvalidArgumentError(f"unknown phantom {name!r}; choose one of: {known}") from exc
    return factory(side, seed)


__all__ = ["BUILTIN_PHANTOMS", "builtin_phantom", "plant", "shepp_logan"]
