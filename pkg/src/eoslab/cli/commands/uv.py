"""UV-model commands: trajectories, phase portraits, fixed points, bifurcations."""

from pathlib import Path
from typing import Any, Optional

import click

from eoslab.application import experiments
from eoslab.application.experiments import NumericDivergenceError
from eoslab.cli.commands.common import (
    _table,
    build_hyper,
    common_options,
    echo_outcome,
    fmt,
    hyper_options,
    summary_table,
)
from eoslab.data.models import FunctionState, GridSpec
from eoslab.dynamics.manifold import (
    DEFAULT_BIN_TOL,
    DEFAULT_RECORD,
    DEFAULT_TRANSIENT,
    MAP_KINDS,
)
from eoslab.dynamics.portrait import COORDINATES, DEFAULT_HORIZON
from eoslab.dynamics.uv import DIVERGENCE_THRESHOLD, learning_rate_from_constant


@click.command("uv-trajectory")
@hyper_options()
@click.option("--c", type=float, help="Learning-rate constant; sets eta = c / lam0.")
@click.option("--df0", type=float, default=-2.0, show_default=True, help="Initial residual.")
@click.option("--lam0", type=float, default=1.0, show_default=True, help="Initial lambda.")
@click.option("--steps", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--threshold", type=float, default=DIVERGENCE_THRESHOLD, show_default=True)
@click.option("--strict", is_flag=True, help="Exit with status 2 if the run diverges.")
@common_options
def uv_trajectory(
    config: dict[str, Any],
    eta: float,
    xnorm: float,
    neff: float,
    y: float,
    c: Optional[float],
    df0: float,
    lam0: float,
    steps: int,
    threshold: float,
    strict: bool,
    out: Path,
    **_: Any,
) -> None:
    """Iterate the function-space map from (df0, lam0)."""
    if c is not None:
        eta = learning_rate_from_constant(c, lam0)
        config["options"]["eta"] = eta
    outcome = experiments.run_uv_trajectory(
        build_hyper(eta, xnorm, neff, y),
        FunctionState(df0, lam0),
        steps,
        threshold,
        out,
        config,
    )
    summary = outcome.summary
    status = (
        f"diverged at step {summary['diverged_at']}" if outcome.diverged else "completed"
    )
    echo_outcome(
        f"UV trajectory at eta={fmt(eta)}: {summary['steps']} steps, {status}.",
        outcome.paths,
        summary_table(summary, ["final_delta_f", "final_lambda", "final_loss"]),
    )
    if strict and outcome.diverged:
        raise NumericDivergenceError(f"trajectory diverged at step {summary['diverged_at']}")


@click.command("uv-portrait")
@hyper_options()
@click.option("--df-min", type=float, default=-6.0, show_default=True)
@click.option("--df-max", type=float, default=2.0, show_default=True)
@click.option("--lam-min", type=float, default=0.0, show_default=True)
@click.option("--lam-max", type=float, default=14.0, show_default=True)
@click.option("--resolution", type=click.IntRange(min=1), default=40, show_default=True)
@click.option(
    "--steps",
    type=click.IntRange(1, 2),
    default=1,
    show_default=True,
    help="1 for the map, 2 for the two-step map.",
)
@click.option(
    "--coordinates",
    type=click.Choice(COORDINATES),
    default="lambda",
    show_default=True,
    help="Second axis of the plane.",
)
@click.option("--horizon", type=click.IntRange(min=1), default=DEFAULT_HORIZON, show_default=True)
@click.option("--threshold", type=float, default=DIVERGENCE_THRESHOLD, show_default=True)
@common_options
def uv_portrait(
    config: dict[str, Any],
    eta: float,
    xnorm: float,
    neff: float,
    y: float,
    df_min: float,
    df_max: float,
    lam_min: float,
    lam_max: float,
    resolution: int,
    steps: int,
    coordinates: str,
    horizon: int,
    threshold: float,
    out: Path,
    **_: Any,
) -> None:
    """Sample the update field and label phase-plane regions."""
    outcome = experiments.run_uv_portrait(
        build_hyper(eta, xnorm, neff, y),
        GridSpec((df_min, df_max), (lam_min, lam_max), resolution),
        steps,
        coordinates,
        horizon,
        threshold,
        out,
        config,
    )
    regions = outcome.summary["regions"]
    echo_outcome(
        f"Phase portrait: {outcome.summary['cells']} cells, "
        f"{outcome.summary['null_arrows']} null arrows.",
        outcome.paths,
        _table(["Region", "Cells"], ([name, str(count)] for name, count in regions.items())),
    )


@click.command("fixed-points")
@hyper_options()
@click.option(
    "--line-lambda",
    type=float,
    help="Point of fixed line I to report (default: its lower end 2||x|||y|/sqrt(neff)).",
)
@common_options
def fixed_points(
    config: dict[str, Any],
    eta: float,
    xnorm: float,
    neff: float,
    y: float,
    line_lambda: Optional[float],
    out: Path,
    **_: Any,
) -> None:
    """Report fixed points I-IV with eigenpairs and stability."""
    outcome = experiments.run_fixed_points(
        build_hyper(eta, xnorm, neff, y), line_lambda, out, config
    )
    rows = [
        [
            report.kind.value,
            fmt(report.location.delta_f),
            fmt(report.location.lam),
            ", ".join(fmt(value) for value in report.eigenvalues),
            report.stability.value,
        ]
        for report in outcome.summary["reports"]
    ]
    rates = [key for key in ("eta_c", "eta_upper", "eta_1", "eta_2") if key in outcome.summary]
    title = "Fixed points"
    if rates:
        title += ": " + ", ".join(f"{key}={fmt(outcome.summary[key])}" for key in rates)
    echo_outcome(
        f"{title}.",
        outcome.paths,
        _table(["Kind", "delta_f", "lambda", "Eigenvalues", "Stability"], rows),
    )


@click.command("uv-bifurcation")
@click.option(
    "--map",
    "map_kind",
    type=click.Choice(MAP_KINDS),
    default="manifold",
    show_default=True,
    help="One-dimensional manifold map or the full two-dimensional map.",
)
@hyper_options(with_eta=False)
@click.option("--eta-min", type=float, default=0.3, show_default=True)
@click.option("--eta-max", type=float, default=1.0, show_default=True)
@click.option("--count", type=click.IntRange(min=2), default=400, show_default=True)
@click.option("--init-df", type=float, help="Initial residual.")
@click.option("--init-lam", type=float, help="Initial lambda (full map only).")
@click.option(
    "--transient", type=click.IntRange(min=0), default=DEFAULT_TRANSIENT, show_default=True
)
@click.option("--record", type=click.IntRange(min=1), default=DEFAULT_RECORD, show_default=True)
@click.option("--bin-tol", type=float, default=DEFAULT_BIN_TOL, show_default=True)
@click.option("--max-period", type=click.IntRange(min=1), default=32, show_default=True)
@click.option("--threshold", type=float, default=DIVERGENCE_THRESHOLD, show_default=True)
@common_options
def uv_bifurcation(
    config: dict[str, Any],
    map_kind: str,
    xnorm: float,
    neff: float,
    y: float,
    eta_min: float,
    eta_max: float,
    count: int,
    init_df: Optional[float],
    init_lam: Optional[float],
    transient: int,
    record: int,
    bin_tol: float,
    max_period: int,
    threshold: float,
    out: Path,
    **_: Any,
) -> None:
    """Late-time lambda values over a learning-rate sweep."""
    init: Optional[Any] = None
    if map_kind == "manifold":
        if init_lam is not None:
            raise click.UsageError("--init-lam applies to --map full only")
        init = init_df
    elif (init_df is None) != (init_lam is None):
        raise click.UsageError("--map full needs both --init-df and --init-lam, or neither")
    elif init_df is not None and init_lam is not None:
        init = FunctionState(init_df, init_lam)

    outcome = experiments.run_bifurcation(
        map_kind,
        build_hyper(eta_min, xnorm, neff, y),
        (eta_min, eta_max),
        count,
        init,
        transient,
        record,
        bin_tol,
        max_period,
        threshold,
        out,
        config,
    )
    echo_outcome(
        f"Bifurcation diagram ({map_kind} map): {count} learning rates.",
        outcome.paths,
        summary_table(outcome.summary, ["diverged", "first_divergence"]),
    )
