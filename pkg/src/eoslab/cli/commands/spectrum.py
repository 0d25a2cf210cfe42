"""Power spectrum of a logged series."""

from pathlib import Path
from typing import Any, Optional

import click

from eoslab.application import experiments
from eoslab.cli.commands.common import common_options, echo_outcome, summary_table


@click.command("spectrum")
@click.option(
    "--input",
    "input_path",
    type=click.Path(dir_okay=False),
    help="CSV file with a header row, e.g. a training log.",
)
@click.option(
    "--column",
    default="sharpness",
    show_default=True,
    help="Column name or 1-based index; empty cells are skipped.",
)
@click.option("--last", type=click.IntRange(min=2), help="Only use the last N values.")
@click.option(
    "--standardize/--raw",
    "standardize_series",
    default=True,
    show_default=True,
    help="Remove the mean and scale to unit variance before transforming.",
)
@common_options
def spectrum(
    config: dict[str, Any],
    input_path: Optional[str],
    column: str,
    last: Optional[int],
    standardize_series: bool,
    out: Path,
    **_: Any,
) -> None:
    """Write the power spectrum of one CSV column as omega,power."""
    if not input_path:
        raise click.UsageError("Missing option '--input'.")
    outcome = experiments.run_spectrum(
        Path(input_path), column, last, standardize_series, out, config
    )
    echo_outcome(
        f"Power spectrum of '{column}' over {outcome.summary['length']} values.",
        outcome.paths,
        summary_table(outcome.summary, ["total_power", "peak_omega"]),
    )
