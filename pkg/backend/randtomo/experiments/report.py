"""Result files of a sweep: raw records, per-N summary and the log-log rate plot."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from randtomo.core.logging import get_logger  # noqa: E402
from randtomo.experiments.fit import RateFitResult  # noqa: E402
from randtomo.utils.io import write_table  # noqa: E402

logger = get_logger(__name__)

_SVG_SALT = "randtomo"


def result_stem(p: float, regime: str) -> str:
    return f"p{p:g}_{regime}"


def write_records(path: Path, records: pd.DataFrame) -> Path:
    return write_table(path, records)


def write_summary(path: Path, fit: RateFitResult) -> Path:
    return write_table(path, fit.summary_frame())


def plot_rates(path: Path, fit: RateFitResult, p: float, regime: str) -> Path:
    """Log-log plot of the mean Bregman distance per N with the fitted c N^β dashed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = fit.n_values.astype(np.float64)
    dense = np.geomspace(n.min(), n.max(), 64)

    with plt.rc_context({"svg.hashsalt": _SVG_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        try:
            ax.loglog(n, fit.per_N_means, "o-", color="tab:blue", label="mean Bregman distance")
            if np.any(fit.per_N_stddevs > 0):
                ax.errorbar(
                    n, fit.per_N_means, yerr=fit.per_N_stddevs, fmt="none", ecolor="tab:blue",
                    alpha=0.4,
                )
            ax.loglog(
                dense,
                fit.predict(dense),
                "--",
                color="black",
                label=f"{fit.c:.3g} N^{fit.beta:.3f}",
            )
            ax.set_xlabel("N (sampled angles)")
            ax.set_ylabel("Bregman distance")
            ax.set_title(f"p = {p:g}, {regime} noise")
            ax.grid(True, which="both", alpha=0.3)
            ax.legend()
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    logger.debug("Wrote rate plot", extra={"ctx_path": str(path)})
    return path


def write_sweep_outputs(
    directory: Path, fit: RateFitResult, records: pd.DataFrame, p: float, regime: str
) -> dict[str, Path]:
    directory = Path(directory)
    stem = result_stem(p, regime)
    return {
        "records": write_records(directory / f"{stem}_raw.csv", records),
        "summary": write_summary(directory / f"{stem}_summary.csv", fit),
        "plot": plot_rates(directory / f"{stem}.svg", fit, p, regime),
    }


__all__ = [
    "plot_rates",
    "result_stem",
    "write_records",
    "write_summary",
    "write_sweep_outputs",
]
