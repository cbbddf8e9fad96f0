"""Ground-truth phantoms and their projection onto the source condition."""

from __future__ import annotations

from pathlib import Path

from randtomo.models.entities import Image
from randtomo.phantoms.builtin import BUILTIN_PHANTOMS, builtin_phantom
from randtomo.phantoms.source_condition import (
    SourceConditionResult,
    project_to_source_condition,
)
from randtomo.utils.io import read_image, resample


def load_phantom(source: str | Path, side: int, seed: int = 0) -> Image:
    """Builtin phantom by name, or an image file resampled to ``side``."""
    if isinstance(source, str) and source in BUILTIN_PHANTOMS:
        return builtin_phantom(source, side, seed)
    return Image.from_array(resample(read_image(Path(source)), side))


__all__ = [
    "BUILTIN_PHANTOMS",
    "SourceConditionResult",
    "builtin_phantom",
    "load_phantom",
    "project_to_source_condition",
]
