"""Network training commands."""

import math
from pathlib import Path
from typing import Any, Callable, Optional

import click

from eoslab.application import experiments
from eoslab.application.experiments import NumericDivergenceError
from eoslab.cli.commands.common import (
    FLOAT_LIST,
    _table,
    common_options,
    echo_outcome,
    fmt,
    summary_table,
)
from eoslab.data.models import Activation, NetworkConfig, Parameterization
from eoslab.networks.curvature import PRESETS
from eoslab.networks.sweeps import AXES
from eoslab.networks.training import LearningRate
from eoslab.sources.factory import parse_dataset_spec

DEFAULT_C = 0.9


def network_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Architecture, dataset and sharpness-measurement options."""
    options = [
        click.option("--depth", type=click.IntRange(min=2), default=2, show_default=True),
        click.option("--width", type=click.IntRange(min=1), default=64, show_default=True),
        click.option(
            "--activation",
            type=click.Choice([a.value for a in Activation]),
            default=Activation.LINEAR.value,
            show_default=True,
        ),
        click.option(
            "--param",
            "parameterization",
            type=click.Choice([p.value for p in Parameterization]),
            default=Parameterization.INTERP.value,
            show_default=True,
            help="Standard (sp) or interpolating (interp) parameterization.",
        ),
        click.option(
            "--s", type=float, default=1.0, show_default=True, help="Interpolation exponent."
        ),
        click.option(
            "--sigma-w2", type=float, default=1.0, show_default=True, help="Weight variance."
        ),
        click.option(
            "--dataset",
            "dataset_spec",
            help="Dataset as kind:args, e.g. single:1,2 or random:256,64,1.",
        ),
        click.option("--standardize", is_flag=True, help="Standardize input columns."),
        click.option(
            "--normalize/--no-normalize",
            default=False,
            show_default=True,
            help="Rescale inputs to the parameterization's norm convention.",
        ),
        click.option(
            "--measure-every", type=click.IntRange(min=1), default=1, show_default=True
        ),
        click.option(
            "--power-preset",
            type=click.Choice(sorted(PRESETS)),
            default="default",
            show_default=True,
            help="Power-iteration budget for sharpness.",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _network(
    depth: int,
    width: int,
    activation: str,
    parameterization: str,
    s: float,
    sigma_w2: float,
) -> NetworkConfig:
    return NetworkConfig(
        depth=depth,
        width=width,
        activation=Activation(activation),
        parameterization=Parameterization(parameterization),
        s=s,
        sigma_w2=sigma_w2,
    )


def _learning_rate(c: Optional[float], eta: Optional[float]) -> LearningRate:
    if c is not None and eta is not None:
        raise click.UsageError("--c and --eta are mutually exclusive")
    if eta is not None:
        return LearningRate.absolute(eta)
    return LearningRate.constant(DEFAULT_C if c is None else c)


@click.command("train")
@network_options
@click.option("--c", type=float, help=f"Learning-rate constant c / lambda_0 [{DEFAULT_C}].")
@click.option("--eta", type=float, help="Absolute learning rate (instead of --c).")
@click.option("--steps", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), help="Minibatch size (default: full).")
@click.option(
    "--measure-from",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="First step at which sharpness is sampled.",
)
@click.option(
    "--threshold",
    type=float,
    default=float("inf"),
    show_default=True,
    help="Loss above which training counts as diverged.",
)
@click.option("--strict", is_flag=True, help="Exit with status 2 if training diverges.")
@common_options
def train(
    config: dict[str, Any],
    seed: int,
    depth: int,
    width: int,
    activation: str,
    parameterization: str,
    s: float,
    sigma_w2: float,
    dataset_spec: Optional[str],
    standardize: bool,
    normalize: bool,
    measure_every: int,
    power_preset: str,
    c: Optional[float],
    eta: Optional[float],
    steps: int,
    batch_size: Optional[int],
    measure_from: int,
    threshold: float,
    strict: bool,
    out: Path,
    **_: Any,
) -> None:
    """Train a fully connected network with gradient descent, logging sharpness."""
    outcome = experiments.run_train(
        _network(depth, width, activation, parameterization, s, sigma_w2),
        parse_dataset_spec(dataset_spec or "single:1,2"),
        _learning_rate(c, eta),
        steps,
        seed,
        batch_size,
        measure_every,
        measure_from,
        PRESETS[power_preset],
        threshold,
        standardize,
        normalize,
        out,
        config,
    )
    summary = outcome.summary
    status = (
        f"diverged at step {summary['diverged_at']}" if outcome.diverged else "completed"
    )
    echo_outcome(
        f"Training at eta={fmt(summary['eta'])}: {summary['steps']} steps, {status}.",
        outcome.paths,
        summary_table(summary, ["lambda0", "final_loss", "final_sharpness"]),
    )
    if strict and outcome.diverged:
        raise NumericDivergenceError(f"training diverged at step {summary['diverged_at']}")


@click.command("phase-diagram")
@network_options
@click.option(
    "--axis",
    type=click.Choice(AXES),
    default="sigma_w2",
    show_default=True,
    help="Initialization knob swept along the first axis.",
)
@click.option(
    "--axis-values",
    type=FLOAT_LIST,
    default="0.5,1,2",
    show_default=True,
    help="Comma-separated values or start:stop:count.",
)
@click.option(
    "--c-values",
    type=FLOAT_LIST,
    default="0.5,1,2,3,4",
    show_default=True,
    help="Learning-rate constants, comma-separated or start:stop:count.",
)
@click.option("--steps", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option(
    "--tail",
    type=click.IntRange(min=1),
    default=200,
    show_default=True,
    help="Trailing sharpness samples averaged per cell.",
)
@common_options
def phase_diagram(
    config: dict[str, Any],
    seed: int,
    threads: Optional[int],
    depth: int,
    width: int,
    activation: str,
    parameterization: str,
    s: float,
    sigma_w2: float,
    dataset_spec: Optional[str],
    standardize: bool,
    normalize: bool,
    measure_every: int,
    power_preset: str,
    axis: str,
    axis_values: list[float],
    c_values: list[float],
    steps: int,
    tail: int,
    out: Path,
    **_: Any,
) -> None:
    """Sweep an initialization knob against c and record eta * sharpness / 2."""
    outcome = experiments.run_phase_diagram(
        axis,
        axis_values,
        c_values,
        _network(depth, width, activation, parameterization, s, sigma_w2),
        parse_dataset_spec(dataset_spec or "random:256,64,1"),
        steps,
        tail,
        seed,
        threads,
        measure_every,
        PRESETS[power_preset],
        standardize,
        normalize,
        out,
        config,
    )
    axis1, cs, values = outcome.summary["diagram"].grid()
    rows = [
        [fmt(float(a))] + [fmt(None if math.isnan(v) else float(v)) for v in values[i]]
        for i, a in enumerate(axis1)
    ]
    echo_outcome(
        f"Phase diagram: {outcome.summary['cells']} cells, "
        f"{outcome.summary['diverged']} diverged.",
        outcome.paths,
        _table([f"{axis} \\ c"] + [fmt(float(c)) for c in cs], rows),
    )
