"""CLI entrypoint for eoslab."""

from contextlib import contextmanager
from typing import Any, Iterator, Optional, Sequence

import click

from eoslab import __version__
from eoslab.application.experiments import NumericDivergenceError
from eoslab.application.log import configure_logging
from eoslab.cli.commands.dataset import dataset
from eoslab.cli.commands.spectrum import spectrum
from eoslab.cli.commands.train import phase_diagram, train
from eoslab.cli.commands.uv import fixed_points, uv_bifurcation, uv_portrait, uv_trajectory
from eoslab.data.validator import ValidationError

DIVERGENCE_EXIT_CODE = 2


class DivergenceExit(click.ClickException):
    """Numeric divergence in a run that must stay finite."""

    exit_code = DIVERGENCE_EXIT_CODE


@contextmanager
def _usage_exit_code() -> Iterator[None]:
    # Usage errors exit 1; 2 is reserved for divergence.
    try:
        yield
    except click.UsageError as e:
        e.exit_code = 1
        raise


class EoslabGroup(click.Group):
    """Group that maps domain errors onto exit codes."""

    def parse_args(self, ctx: click.Context, args: list[str]) -> list[str]:
        with _usage_exit_code():
            return super().parse_args(ctx, args)

    def invoke(self, ctx: click.Context) -> Any:
        with _usage_exit_code():
            try:
                return super().invoke(ctx)
            except NumericDivergenceError as e:
                raise DivergenceExit(str(e)) from e
            except ValidationError as e:
                raise click.ClickException(str(e)) from e


@click.group(cls=EoslabGroup)
@click.version_option(__version__, prog_name="eoslab")
@click.option("-v", "--verbose", count=True, help="Log progress (-v info, -vv debug).")
def cli(verbose: int) -> None:
    """eoslab: edge-of-stability experiments on the UV model and trained networks."""
    configure_logging(verbose)


# Register subcommands
cli.add_command(uv_trajectory)
cli.add_command(uv_portrait)
cli.add_command(fixed_points)
cli.add_command(uv_bifurcation)
cli.add_command(train)
cli.add_command(phase_diagram)
cli.add_command(spectrum)
cli.add_command(dataset)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the process exit code."""
    try:
        rv = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="eoslab",
            standalone_mode=False,
        )
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    raise SystemExit(run())
