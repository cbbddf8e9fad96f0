"""Test fixtures for randtomo."""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

import numpy as np
import pytest

BACKEND_ROOT = Path(__file__).resolve().parents[1]
if str(BACKEND_ROOT) not in sys.path:
    sys.path.insert(0, str(BACKEND_ROOT))


@pytest.fixture(autouse=True)
def reset_state(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Reset cached settings and RANDTOMO_* environment between tests."""
    for key in list(os.environ):
        if key.startswith("RANDTOMO_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("RANDTOMO_OUTPUT_DIR", str(tmp_path / "runs"))

    from randtomo.core.config import get_settings

    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    logging.getLogger().handlers = []


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tiny_radon():
    from randtomo.operators.radon import RadonOperator

    return RadonOperator(8, 12)


@pytest.fixture(scope="session")
def small_radon():
    from randtomo.operators.radon import RadonOperator

    return RadonOperator(16, 24)


@pytest.fixture()
def tiny_image(rng: np.random.Generator):
    from randtomo.models.entities import Image

    return Image(rng.standard_normal(64), 8)
