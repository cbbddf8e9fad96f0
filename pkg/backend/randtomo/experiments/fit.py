"""Monomial fits c N^β of mean Bregman distances and per-N aggregation of record tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import stats

from randtomo.core.errors import InvalidArgumentError

SUMMARY_COLUMNS = ("N", "mean_bregman", "stddev", "fit_c", "fit_beta", "r_squared")


@dataclass(slots=True)
class RateFitResult:
    c: float
    beta: float
    per_N_means: np.ndarray
    per_N_stddevs: np.ndarray
    r_squared: float
    n_values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def predict(self, n: np.ndarray | float) -> np.ndarray:
        return self.c * np.asarray(n, dtype=np.float64) ** self.beta

    def summary_frame(self) -> pd.DataFrame:
        size = self.n_values.size
        return pd.DataFrame(
            {
                "N": self.n_values.astype(np.int64),
                "mean_bregman": self.per_N_means,
                "stddev": self.per_N_stddevs,
                "fit_c": np.full(size, self.c),
                "fit_beta": np.full(size, self.beta),
                "r_squared": np.full(size, self.r_squared),
            },
            columns=list(SUMMARY_COLUMNS),
        )


def fit_monomial(
    n_values: Sequence[int] | np.ndarray,
    means: Sequence[float] | np.ndarray,
    stddevs: Sequence[float] | np.ndarray | None = None,
) -> RateFitResult:
    """Least squares line through (log N, log mean): c = exp(intercept), β = slope."""
    n = np.asarray(n_values, dtype=np.float64)
    m = np.asarray(means, dtype=np.float64)
    if n.shape != m.shape or n.ndim != 1:
        raise InvalidArgumentError("n_values and means must be 1-D and of equal length")
    if np.unique(n).size < 2:
        raise InvalidArgumentError("a monomial fit needs at least two distinct N")
    if np.any(n <= 0):
        raise InvalidArgumentError("N values must be positive")
    if np.any(~(m > 0)):
        raise InvalidArgumentError("mean Bregman distances must be positive to fit on a log scale")

    x, y = np.log(n), np.log(m)
    fit = stats.linregress(x, y)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else float(fit.rvalue) ** 2
    spread = np.zeros_like(m) if stddevs is None else np.asarray(stddevs, dtype=np.float64)
    return RateFitResult(
        c=float(np.exp(fit.intercept)),
        beta=float(fit.slope),
        per_N_means=m,
        per_N_stddevs=spread,
        r_squared=min(max(r_squared, 0.0), 1.0),
        n_values=n.astype(np.int64),
    )


def aggregate_records(records: pd.DataFrame) -> pd.DataFrame:
    """Per-N mean and sample standard deviation of the Bregman distance over ``ok`` rows."""
    ok = records
    if "status" in records.columns:
        ok = records[records["status"] == "ok"]
    grouped = ok.groupby("N", sort=True)["bregman"]
    table = pd.DataFrame({"mean_bregman": grouped.mean(), "stddev": grouped.std(ddof=1)})
    table["stddev"] = table["stddev"].fillna(0.0)
    return table.reset_index()


def fit_records(records: pd.DataFrame) -> RateFitResult:
    table = aggregate_records(records)
    return fit_monomial(
        table["N"].to_numpy(), table["mean_bregman"].to_numpy(), table["stddev"].to_numpy()
    )


__all__ = ["RateFitResult", "SUMMARY_COLUMNS", "aggregate_records", "fit_monomial", "fit_records"]
