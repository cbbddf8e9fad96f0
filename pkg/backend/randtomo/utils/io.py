"""File formats: CSV matrices, 16-bit PGM images, JSON documents and record tables.

CSV matrices are comma separated with one image row (or one sinogram angle) per line, every
value written with ``%.17g`` so a read-back is lossless. PGM files are binary ``P5`` with maxval
65535; values are min-max scaled, so they are for viewing only.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import orjson
import pandas as pd
from PIL import Image as PILImage

from randtomo.core.errors import DimensionError, InvalidArgumentError

FLOAT_FORMAT = "%.17g"
_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
_PGM_MAX = 65535


def _ensure_parent(path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_matrix_csv(path: Path, matrix: np.ndarray) -> Path:
    path = _ensure_parent(path)
    np.savetxt(path, np.atleast_2d(matrix), fmt=FLOAT_FORMAT, delimiter=",")
    return path


def read_matrix_csv(path: Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    return np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)


def to_uint16(matrix: np.ndarray) -> np.ndarray:
    """Linear min-max scaling onto 0..65535 (constant input maps to zeros)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    low, high = float(matrix.min()), float(matrix.max())
    if high <= low:
        return np.zeros(matrix.shape, dtype=np.uint16)
    scaled = np.rint((matrix - low) / (high - low) * _PGM_MAX)
    return scaled.astype(np.uint16)


def write_pgm(path: Path, matrix: np.ndarray) -> Path:
    path = _ensure_parent(path)
    PILImage.fromarray(to_uint16(np.atleast_2d(matrix))).save(path, format="PPM")
    return path


def read_image(path: Path) -> np.ndarray:
    """Load a square image from ``.csv`` or any raster format Pillow reads (PGM, PNG, ...)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    if path.suffix.lower() == ".csv":
        matrix = read_matrix_csv(path)
    else:
        try:
            with PILImage.open(path) as raster:
                if raster.mode not in ("I", "I;16", "F"):
                    raster = raster.convert("F")
                matrix = np.asarray(raster, dtype=np.float64)
        except OSError as exc:
            raise InvalidArgumentError(f"cannot read image {path}: {exc}") from exc
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{path} holds a {matrix.shape} array; expected a square image")
    return matrix


def resample(matrix: np.ndarray, side: int) -> np.ndarray:
    """Area-averaging resize to ``side x side`` via Pillow's 32-bit float mode."""
    if matrix.shape == (side, side):
        return np.asarray(matrix, dtype=np.float64)
    raster = PILImage.fromarray(np.asarray(matrix, dtype=np.float32))
    resized = raster.resize((side, side), resample=PILImage.Resampling.BOX)
    return np.asarray(resized, dtype=np.float64)


def write_json(path: Path, payload: Any) -> Path:
    path = _ensure_parent(path)
    path.write_bytes(orjson.dumps(payload, option=_JSON_OPTIONS, default=str))
    return path


def read_json(path: Path) -> Any:
    return orjson.loads(Path(path).read_bytes())


def write_table(path: Path, frame: pd.DataFrame) -> Path:
    """CSV with a fixed float format and ``\\n`` line endings so reruns are byte-identical."""
    path = _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_table(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    return pd.read_csv(path)


__all__ = [
    "FLOAT_FORMAT",
    "read_image",
    "read_json",
    "read_matrix_csv",
    "read_table",
    "resample",
    "to_uint16",
    "write_json",
    "write_matrix_csv",
    "write_pgm",
    "write_table",
]
