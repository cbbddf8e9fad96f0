"""Run manifests: identifiers, input digests and library versions."""

from __future__ import annotations

import hashlib
import uuid
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable

from randtomo.models.dto import Manifest
from randtomo.utils.io import write_json

_TRACKED_PACKAGES = ("randtomo", "numpy", "scipy", "pandas", "pydantic")


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def utc_now() -> datetime:
    return datetime.now(tz=timezone.utc)


def new_run_id(command: str, when: datetime | None = None) -> str:
    """``<command>-<UTC stamp>-<8 hex>``; sortable by start time."""
    when = when or utc_now()
    return f"{command}-{when:%Y%m%dT%H%M%SZ}-{uuid.uuid4().hex[:8]}"


def package_versions(names: Iterable[str] = _TRACKED_PACKAGES) -> dict[str, str]:
    versions: dict[str, str] = {}
    for name in names:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def build_manifest(
    command: str,
    settings: dict[str, Any],
    seeds: dict[str, Any] | None = None,
    inputs: Iterable[Path] = (),
    outputs: Iterable[str] = (),
    summary: dict[str, Any] | None = None,
) -> Manifest:
    created = utc_now()
    return Manifest(
        run_id=new_run_id(command, created),
        command=command,
        created_at=created,
        settings=settings,
        seeds=seeds or {},
        versions=package_versions(),
        inputs={str(path): sha256_file(path) for path in inputs},
        outputs=sorted(outputs),
        summary=summary or {},
    )


def write_manifest(directory: Path, manifest: Manifest) -> Path:
    path = directory / "manifest.json"
    write_json(path, manifest.model_dump(mode="json"))
    return path


__all__ = [
    "build_manifest",
    "new_run_id",
    "package_versions",
    "sha256_file",
    "utc_now",
    "write_manifest",
]
