"""Prometheus metrics instrumentation."""

from __future__ import annotations

from pathlib import Path

try:  # pragma: no cover - optional dependency
    from prometheus_client import (
        CollectorRegistry,
        Counter,
        Gauge,
        Histogram,
        write_to_textfile,
    )
except Exception:  # pragma: no cover - fallback when prometheus unavailable

    class _NoopMetric:
        def __init__(self, *args, **kwargs) -> None:
            pass

        def labels(self, *args, **kwargs):  # noqa: D401
            return self

        def inc(self, *args, **kwargs) -> None:  # noqa: D401
            pass

        def observe(self, *args, **kwargs) -> None:  # noqa: D401
            pass

        def set(self, *args, **kwargs) -> None:  # noqa: D401
            pass

    class _NoopRegistry:  # noqa: D401
        def __init__(self, *args, **kwargs) -> None:
            pass

    CollectorRegistry = _NoopRegistry  # type: ignore
    Counter = Gauge = Histogram = _NoopMetric  # type: ignore

    def write_to_textfile(path: str, registry: object) -> None:  # noqa: D401
        Path(path).write_text("", encoding="utf-8")

REGISTRY = CollectorRegistry()

SOLVE_COUNT = Counter(
    "randtomo_solves_total",
    "Total PGD solves",
    labelnames=("outcome",),
    registry=REGISTRY,
)

SOLVE_ITERATIONS = Histogram(
    "randtomo_solve_iterations",
    "PGD iterations per solve",
    buckets=(10, 50, 100, 250, 500, 1000, 2000, 5000, 10000),
    registry=REGISTRY,
)

REALIZATION_FAILURES = Counter(
    "randtomo_realization_failures_total",
    "Realizations that raised during a sweep",
    labelnames=("error",),
    registry=REGISTRY,
)

SWEEP_DURATION = Histogram(
    "randtomo_sweep_duration_seconds",
    "Wall time of a full N sweep",
    labelnames=("regime",),
    registry=REGISTRY,
)

FITTED_BETA = Gauge(
    "randtomo_fitted_beta",
    "Fitted decay exponent of the last sweep",
    labelnames=("p", "regime"),
    registry=REGISTRY,
)


def write_metrics(path: Path) -> None:
    """Dump the registry in Prometheus text exposition format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)


__all__ = [
    "REGISTRY",
    "SOLVE_COUNT",
    "SOLVE_ITERATIONS",
    "REALIZATION_FAILURES",
    "SWEEP_DURATION",
    "FITTED_BETA",
    "write_metrics",
]
