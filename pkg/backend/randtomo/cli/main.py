"""CLI entrypoint for randtomo."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

import numpy as np
import pandas as pd
import typer
from pydantic import ValidationError

from randtomo.core.config import Settings
from randtomo.core.errors import (
    NUMERICAL_ERRORS,
    USER_ERRORS,
    CapabilityError,
    DimensionError,
    DivergenceError,
    InvalidArgumentError,
    SweepFailedError,
)
from randtomo.core.logging import configure_logging, get_logger
from randtomo.core.metrics import write_metrics
from randtomo.experiments.diagnostics import (
    adjoint_mismatch,
    besov_assumption_sum,
    effective_dimension,
    kappa,
    mass_mismatch,
    script_R_quadratic,
)
from randtomo.experiments.fit import fit_records
from randtomo.experiments.plan import ExperimentPlan, build_plan, default_c_alpha, penalty_for
from randtomo.experiments.report import (
    plot_rates,
    result_stem,
    write_records,
    write_summary,
    write_sweep_outputs,
)
from randtomo.experiments.runner import RECORD_COLUMNS, draw_realization, run_sweep, scan_c_alpha
from randtomo.models.dto import SolverConfig
from randtomo.models.entities import RngSeed
from randtomo.operators.radon import RadonOperator
from randtomo.phantoms import BUILTIN_PHANTOMS, SourceConditionResult, load_phantom
from randtomo.phantoms.source_condition import project_to_source_condition
from randtomo.regularization.penalty import Penalty
from randtomo.solvers.pgd import apriori_check, pgd_solve
from randtomo.utils.io import read_table, write_json, write_matrix_csv, write_pgm, write_table
from randtomo.utils.provenance import build_manifest, write_manifest
from randtomo.utils.rng import ANGLE_STREAM, NOISE_STREAM

app = typer.Typer(
    name="randtomo",
    help="p-homogeneous regularization for tomography with randomly sampled angles",
    no_args_is_help=True,
    add_completion=False,
)

logger = get_logger(__name__)

C_ALPHA_SCAN_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0)
DIAGNOSE_ALPHAS = tuple(float(a) for a in np.logspace(-6, 0, 7))

_HINTS: dict[type[BaseException], str] = {
    FileNotFoundError: "check the path or set RANDTOMO_CONFIG",
    DimensionError: "the wavelet penalty (p < 2) needs a power-of-two --side",
    InvalidArgumentError: "check the command-line values against `randtomo <command> --help`",
    CapabilityError: "lower --side/--n-theta or raise diagnostics.svd_cap in the config",
    DivergenceError: "lower --c-alpha or raise solver.max_iters",
    SweepFailedError: "inspect the status column of the raw CSV for the failing realizations",
}


def _hint(exc: BaseException) -> str:
    for kind, hint in _HINTS.items():
        if isinstance(exc, kind):
            return hint
    return "rerun with RANDTOMO_LOG_LEVEL=DEBUG for details"


def _fail(code: int, message: str, exc: BaseException) -> None:
    typer.echo(f"error: {message} (hint: {_hint(exc)})", err=True)
    raise typer.Exit(code=code)


@contextmanager
def _handled(command: str) -> Iterator[None]:
    """Map user errors to exit code 1 and numerical failures to exit code 2."""
    try:
        yield
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ())) or "settings"
        _fail(1, f"invalid configuration for {where}: {first.get('msg')}", exc)
    except USER_ERRORS as exc:
        _fail(1, str(exc), exc)
    except NUMERICAL_ERRORS as exc:
        logger.error("%s failed: %s", command, exc, extra={"ctx_command": command})
        _fail(2, str(exc), exc)


def _settings(config: Optional[Path], **overrides: Any) -> Settings:
    settings = Settings.from_yaml(config, overrides=overrides)
    configure_logging(settings.log_level, settings.log_json)
    return settings


def _solver_config(settings: Settings, trace: bool = False) -> SolverConfig:
    return SolverConfig(
        max_iters=settings.max_iters,
        rel_tol=settings.rel_tol,
        obj_tol=settings.obj_tol,
        bb_variant=settings.bb_variant,
        trace=trace,
    )


def _phantom_inputs(source: str) -> list[Path]:
    return [] if source in BUILTIN_PHANTOMS else [Path(source)]


def _project(settings: Settings, op: RadonOperator, pen: Penalty) -> SourceConditionResult:
    f0 = load_phantom(settings.phantom, settings.side, settings.seed)
    return project_to_source_condition(
        f0,
        op,
        pen,
        lambda_sc=settings.lambda_sc,
        rng=RngSeed(settings.seed),
        tol=settings.sc_tol,
        max_iters=settings.sc_max_iters,
    )


def _plan(
    settings: Settings,
    op: RadonOperator,
    sc: SourceConditionResult,
    n_values: tuple[int, ...],
    realizations: int,
    trace: bool = False,
) -> ExperimentPlan:
    return build_plan(
        settings.p,
        settings.regime,
        sc,
        op,
        n_values,
        realizations,
        settings.seed,
        c_alpha=settings.c_alpha,
        c_delta=settings.c_delta,
        solver=_solver_config(settings, trace),
    )


def _seeds(settings: Settings) -> dict[str, int]:
    return {"base": settings.seed, "angle_stream": ANGLE_STREAM, "noise_stream": NOISE_STREAM}


def _write_metrics_file(directory: Path) -> Path:
    path = directory / "metrics.prom"
    write_metrics(path)
    return path


def _finish(
    command: str,
    directory: Path,
    settings: Settings,
    outputs: list[Path],
    summary: dict[str, Any] | None = None,
    inputs: list[Path] | None = None,
) -> Path:
    manifest = build_manifest(
        command,
        settings.model_dump(mode="json"),
        seeds=_seeds(settings),
        inputs=inputs or [],
        outputs=[path.name for path in outputs],
        summary=summary,
    )
    return write_manifest(directory, manifest)


@app.command()
def phantom(
    source: Optional[str] = typer.Option(
        None, "--source", help=f"Builtin phantom ({', '.join(BUILTIN_PHANTOMS)}) or image file"
    ),
    p: Optional[float] = typer.Option(None, "--p", help="Homogeneity exponent in (1, 2]"),
    side: Optional[int] = typer.Option(None, "--side", help="Image side in pixels"),
    n_theta: Optional[int] = typer.Option(None, "--n-theta", help="Size of the fine angle grid"),
    lambda_sc: Optional[float] = typer.Option(None, "--lambda-sc", help="Ridge parameter"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
) -> None:
    """Project a phantom onto the source condition and write f†, w and provenance."""
    with _handled("phantom"):
        settings = _settings(
            config,
            phantom=source,
            p=p,
            side=side,
            n_theta=n_theta,
            lambda_sc=lambda_sc,
            seed=seed,
            output_dir=output_dir,
        )
        op = RadonOperator(settings.side, settings.n_theta)
        pen = penalty_for(settings.p, settings.side)
        inputs = _phantom_inputs(settings.phantom)
        sc = _project(settings, op, pen)

        directory = settings.output_dir / "phantom"
        provenance = {
            "source": settings.phantom,
            "side": settings.side,
            "n_theta": settings.n_theta,
            "n_dtc": op.n_dtc,
            **sc.provenance(pen),
        }
        outputs = [
            write_matrix_csv(directory / "f_dagger.csv", sc.f_dagger.array),
            write_pgm(directory / "f_dagger.pgm", sc.f_dagger.array),
            write_matrix_csv(directory / "w.csv", sc.w.matrix),
            write_json(directory / "provenance.json", provenance),
        ]
        _finish("phantom", directory, settings, outputs, provenance, inputs)
        typer.echo(
            f"f† written to {directory} (rel_change={sc.rel_change:.4f}, "
            f"sc_residual={provenance['sc_residual_relative']:.2e})"
        )


@app.command()
def reconstruct(
    source: Optional[str] = typer.Option(None, "--source", help="Builtin phantom or image file"),
    p: Optional[float] = typer.Option(None, "--p", help="Homogeneity exponent in (1, 2]"),
    regime: Optional[str] = typer.Option(None, "--regime", help="fixed or decreasing"),
    c_alpha: Optional[float] = typer.Option(None, "--c-alpha", help="Regularization constant"),
    c_delta: Optional[float] = typer.Option(
        None, "--c-delta", help="Noise constant relative to ||A f†||_∞"
    ),
    n: Optional[int] = typer.Option(None, "--n", help="Number of sampled angles"),
    realization: int = typer.Option(0, "--realization", min=0, help="Realization index"),
    side: Optional[int] = typer.Option(None, "--side", help="Image side in pixels"),
    n_theta: Optional[int] = typer.Option(None, "--n-theta", help="Size of the fine angle grid"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
    trace: bool = typer.Option(False, "--trace/--no-trace", help="Log every PGD iteration"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
) -> None:
    """Reconstruct from one draw of N random angles and write the result with its trace."""
    with _handled("reconstruct"):
        settings = _settings(
            config,
            phantom=source,
            p=p,
            regime=regime,
            c_alpha=c_alpha,
            c_delta=c_delta,
            side=side,
            n_theta=n_theta,
            seed=seed,
            output_dir=output_dir,
        )
        n_angles = n if n is not None else settings.n_values[0]
        op = RadonOperator(settings.side, settings.n_theta)
        pen = penalty_for(settings.p, settings.side)
        inputs = _phantom_inputs(settings.phantom)
        sc = _project(settings, op, pen)
        plan = _plan(settings, op, sc, (n_angles,), realization + 1, trace)

        drawn = draw_realization(plan, n_angles, realization, op)
        result = pgd_solve(drawn.operator, drawn.data, pen, drawn.alpha, plan.solver)
        bregman = pen.bregman(result.reconstruction, sc.f_dagger)
        provenance = {
            "p": settings.p,
            "regime": settings.regime,
            "N": n_angles,
            "realization": realization,
            "angles": list(drawn.operator.angles.indices),
            "delta": drawn.delta,
            "alpha": drawn.alpha,
            "c_alpha": plan.schedule.c_alpha,
            "c_delta": plan.regime.c_delta,
            "bregman": bregman,
            "objective": float(result.objective_trace[-1]),
            "iterations": result.iterations,
            "converged": result.converged,
            "stop_reason": result.stop_reason,
            "apriori_ok": apriori_check(
                result, pen, sc.f_dagger, drawn.delta, drawn.alpha, drawn.noise
            ),
        }

        directory = settings.output_dir / "reconstruct"
        stem = f"{result_stem(settings.p, settings.regime)}_N{n_angles}_r{realization}"
        outputs = [
            write_matrix_csv(directory / f"{stem}_reconstruction.csv", result.reconstruction.array),
            write_pgm(directory / f"{stem}_reconstruction.pgm", result.reconstruction.array),
            write_matrix_csv(directory / f"{stem}_sinogram.csv", drawn.data.matrix),
            write_pgm(directory / f"{stem}_sinogram.pgm", drawn.data.matrix),
            write_table(directory / f"{stem}_trace.csv", result.trace_frame()),
            write_json(directory / f"{stem}_provenance.json", provenance),
        ]
        _finish("reconstruct", directory, settings, outputs, provenance, inputs)
        typer.echo(
            f"N={n_angles} bregman={bregman:.6g} iterations={result.iterations} "
            f"stop={result.stop_reason}"
        )


@app.command()
def experiment(
    p: Optional[float] = typer.Option(None, "--p", help="Homogeneity exponent in (1, 2]"),
    regime: Optional[str] = typer.Option(None, "--regime", help="fixed or decreasing"),
    c_alpha: Optional[float] = typer.Option(None, "--c-alpha", help="Regularization constant"),
    c_delta: Optional[float] = typer.Option(
        None, "--c-delta", help="Noise constant relative to ||A f†||_∞"
    ),
    side: Optional[int] = typer.Option(None, "--side", help="Image side in pixels"),
    n_theta: Optional[int] = typer.Option(None, "--n-theta", help="Size of the fine angle grid"),
    n_values: Optional[str] = typer.Option(
        None, "--n-values", help="Comma separated, strictly increasing sample sizes"
    ),
    realizations: Optional[int] = typer.Option(None, "--realizations", help="Draws per N"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker processes"),
    paper_scale: bool = typer.Option(
        False, "--paper-scale", help="Use the large geometry and sweep instead of desk scale"
    ),
    tune_c_alpha: bool = typer.Option(
        False, "--tune-c-alpha", help="Pick c_alpha by a reduced sweep over a grid first"
    ),
    dry_run: bool = typer.Option(False, "--dry-run", help="Resolve the plan, write the manifest"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
) -> None:
    """Run the Monte-Carlo sweep over N and fit the decay c N^β of the Bregman distance."""
    with _handled("experiment"):
        settings = _settings(
            config,
            p=p,
            regime=regime,
            c_alpha=c_alpha,
            c_delta=c_delta,
            side=side,
            n_theta=n_theta,
            n_values=n_values,
            realizations=realizations,
            seed=seed,
            workers=workers,
            paper_scale=paper_scale or None,
            output_dir=output_dir,
        )
        directory = settings.output_dir / "experiment"
        stem = result_stem(settings.p, settings.regime)
        resolved_c_alpha = settings.c_alpha or default_c_alpha(settings.p, settings.regime)
        preview = {
            "p": settings.p,
            "regime": settings.regime,
            "c_alpha": resolved_c_alpha,
            "n_values": list(settings.n_values),
            "realizations": settings.realizations,
            "tasks": len(settings.n_values) * settings.realizations,
        }
        if dry_run:
            path = _finish("experiment", directory, settings, [], {"dry_run": True, **preview})
            typer.echo(f"dry run: {preview['tasks']} tasks planned, manifest at {path}")
            return

        op = RadonOperator(settings.side, settings.n_theta)
        pen = penalty_for(settings.p, settings.side)
        inputs = _phantom_inputs(settings.phantom)
        sc = _project(settings, op, pen)
        plan = _plan(settings, op, sc, tuple(settings.n_values), settings.realizations)

        outputs: list[Path] = []
        if tune_c_alpha:
            grid = settings.c_alpha_grid or [
                resolved_c_alpha * factor for factor in C_ALPHA_SCAN_FACTORS
            ]
            best, scores = scan_c_alpha(
                plan, grid, realizations=settings.tune_realizations, workers=settings.workers
            )
            outputs.append(write_table(directory / f"{stem}_c_alpha_scan.csv", scores))
            plan = plan.with_c_alpha(best)
            preview["c_alpha"] = best
            logger.info("Tuned c_alpha", extra={"ctx_c_alpha": best})

        try:
            result = run_sweep(
                plan, workers=settings.workers, failure_tolerance=settings.failure_tolerance
            )
        except SweepFailedError as exc:
            if isinstance(exc.records, pd.DataFrame):
                outputs.append(write_records(directory / f"{stem}_raw.csv", exc.records))
            outputs.append(_write_metrics_file(directory))
            summary = {**preview, "failed": exc.failures}
            _finish("experiment", directory, settings, outputs, summary, inputs)
            raise

        outputs.extend(
            write_sweep_outputs(
                directory, result.fit, result.records, settings.p, settings.regime
            ).values()
        )
        outputs.append(_write_metrics_file(directory))
        summary = {
            **preview,
            "beta": result.fit.beta,
            "c": result.fit.c,
            "r_squared": result.fit.r_squared,
            **result.stats.to_dict(),
        }
        _finish("experiment", directory, settings, outputs, summary, inputs)
        typer.echo(
            f"p={settings.p:g} regime={settings.regime} beta={result.fit.beta:.4f} "
            f"c={result.fit.c:.4g} r2={result.fit.r_squared:.3f} "
            f"failed={result.stats.failed}"
        )


@app.command()
def fit(
    raw: Path = typer.Argument(..., help="Raw record CSV written by `randtomo experiment`"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
) -> None:
    """Recompute summaries, fits and plots from an existing raw record table."""
    with _handled("fit"):
        settings = _settings(config, output_dir=output_dir)
        records = read_table(raw)
        missing = [column for column in RECORD_COLUMNS if column not in records.columns]
        if missing:
            raise InvalidArgumentError(f"{raw} lacks record columns {missing}")

        directory = settings.output_dir / "fit"
        outputs: list[Path] = []
        fits: dict[str, dict[str, float]] = {}
        for (p, regime), group in records.groupby(["p", "regime"], sort=True):
            result = fit_records(group)
            stem = result_stem(float(p), str(regime))
            outputs.append(write_summary(directory / f"{stem}_summary.csv", result))
            outputs.append(plot_rates(directory / f"{stem}.svg", result, float(p), str(regime)))
            fits[stem] = {"beta": result.beta, "c": result.c, "r_squared": result.r_squared}
            typer.echo(
                f"p={float(p):g} regime={regime} beta={result.beta:.4f} c={result.c:.4g} "
                f"r2={result.r_squared:.3f}"
            )
        _finish("fit", directory, settings, outputs, fits, [raw])


@app.command()
def diagnose(
    p: Optional[float] = typer.Option(None, "--p", help="Homogeneity exponent in (1, 2]"),
    regime: Optional[str] = typer.Option(None, "--regime", help="fixed or decreasing"),
    side: Optional[int] = typer.Option(None, "--side", help="Image side of the diagnostic grid"),
    n_theta: Optional[int] = typer.Option(
        None, "--n-theta", help="Angle grid size of the diagnostic operator"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", help="Output directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML configuration file"),
) -> None:
    """Operator checks, effective dimension, Besov sums and an a-priori check on a small solve."""
    with _handled("diagnose"):
        settings = _settings(
            config,
            p=p,
            regime=regime,
            diag_side=side,
            diag_n_theta=n_theta,
            seed=seed,
            output_dir=output_dir,
        )
        small = settings.model_copy(
            update={
                "side": settings.diag_side,
                "n_theta": settings.diag_n_theta,
                "n_values": [max(1, settings.diag_n_theta // 2)],
            }
        )
        report = run_diagnostics(small)
        directory = settings.output_dir / "diagnose"
        outputs = [
            write_json(directory / "diagnostics.json", report),
            _write_text_report(directory / "diagnostics.txt", report),
        ]
        _finish("diagnose", directory, settings, outputs, {"checks": report["checks"]})
        typer.echo(_format_report(report))


def run_diagnostics(settings: Settings) -> dict[str, Any]:
    op = RadonOperator(settings.side, settings.n_theta)
    pen = penalty_for(settings.p, settings.side)
    f0 = load_phantom(settings.phantom, settings.side, settings.seed)
    alphas = np.asarray(DIAGNOSE_ALPHAS)
    dims = np.atleast_1d(effective_dimension(op, alphas, settings.svd_cap))

    report: dict[str, Any] = {
        "geometry": {"side": op.side, "n_theta": op.n_theta, "n_dtc": op.n_dtc},
        "p": settings.p,
        "adjoint_mismatch": adjoint_mismatch(op, seed=settings.seed),
        "mass_mismatch": mass_mismatch(op, f0),
        "norms": kappa(op),
        "effective_dimension": {"alpha": alphas.tolist(), "value": dims.tolist()},
    }

    besov = besov_assumption_sum(op, Penalty.besov(settings.p, op.side), op.n_pixels)
    report["besov_sum"] = {
        "total": besov.total,
        "level_subtotals": {str(level): value for level, value in besov.level_subtotals.items()},
    }

    sc = _project(settings, op, pen)
    if pen.transform.kind == "identity":
        report["quadratic_approximation"] = {
            "beta": alphas.tolist(),
            "value": [
                script_R_quadratic(op, sc.f_dagger, float(beta), pen, settings.svd_cap)
                for beta in alphas
            ],
        }

    n = settings.n_values[0]
    plan = _plan(settings, op, sc, (n,), 1)
    drawn = draw_realization(plan, n, 0, op)
    result = pgd_solve(drawn.operator, drawn.data, pen, drawn.alpha, plan.solver)
    apriori = apriori_check(result, pen, sc.f_dagger, drawn.delta, drawn.alpha, drawn.noise)
    report["source_condition"] = sc.provenance(pen)
    report["small_solve"] = {
        "N": n,
        "alpha": drawn.alpha,
        "delta": drawn.delta,
        "iterations": result.iterations,
        "converged": result.converged,
        "apriori_ok": apriori,
    }
    report["checks"] = {
        "adjoint_ok": report["adjoint_mismatch"] < 1e-8,
        "mass_ok": report["mass_mismatch"] < 1e-6,
        "effective_dimension_decreasing": bool(np.all(np.diff(dims) < 0)),
        "apriori_ok": apriori,
    }
    return report


def _format_report(report: dict[str, Any]) -> str:
    geometry = report["geometry"]
    norms = report["norms"]
    lines = [
        f"geometry: side={geometry['side']} n_theta={geometry['n_theta']} "
        f"n_dtc={geometry['n_dtc']}",
        f"adjoint mismatch: {report['adjoint_mismatch']:.3e}",
        f"mass mismatch: {report['mass_mismatch']:.3e}",
        f"kappa: {norms['kappa']:.6g} (averaged norm {norms['averaged_norm']:.6g})",
        "effective dimension:",
    ]
    dims = report["effective_dimension"]
    lines.extend(
        f"  alpha={alpha:.1e}  N(alpha)={value:.6g}"
        for alpha, value in zip(dims["alpha"], dims["value"])
    )
    lines.append(f"besov sum (p={report['p']:g}): {report['besov_sum']['total']:.6g}")
    if "quadratic_approximation" in report:
        lines.append("quadratic approximation term:")
        quad = report["quadratic_approximation"]
        lines.extend(
            f"  beta={beta:.1e}  R={value:.6g}" for beta, value in zip(quad["beta"], quad["value"])
        )
    solve = report["small_solve"]
    lines.append(
        f"small solve: N={solve['N']} iterations={solve['iterations']} "
        f"converged={solve['converged']} apriori_ok={solve['apriori_ok']}"
    )
    for name, ok in report["checks"].items():
        lines.append(f"check {name}: {'ok' if ok else 'FAILED'}")
    return "\n".join(lines)


def _write_text_report(path: Path, report: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_format_report(report) + "\n", encoding="utf-8")
    return path


if __name__ == "__main__":  # pragma: no cover
    app()
