"""Dataset generation command."""

from pathlib import Path
from typing import Any

import click

from eoslab.application import experiments
from eoslab.cli.commands.common import common_options, echo_outcome, summary_table
from eoslab.sources.factory import parse_dataset_spec


@click.command("dataset")
@click.option(
    "--dataset",
    "dataset_spec",
    default="random:256,64,1",
    show_default=True,
    help="Dataset as kind:args (single, random, power-law, teacher, csv).",
)
@click.option("--standardize", is_flag=True, help="Standardize input columns.")
@common_options
def dataset(
    config: dict[str, Any],
    seed: int,
    dataset_spec: str,
    standardize: bool,
    out: Path,
    **_: Any,
) -> None:
    """Generate a dataset and write it as CSV (x_1..x_d, y_1..y_k)."""
    outcome = experiments.run_dataset(
        parse_dataset_spec(dataset_spec), seed, standardize, out, config
    )
    echo_outcome(
        f"Dataset '{dataset_spec}': {outcome.summary['examples']} examples.",
        outcome.paths,
        summary_table(outcome.summary, ["d_in", "d_out", "constant_columns"]),
    )
