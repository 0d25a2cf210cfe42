"""Options and rendering shared by all commands."""

import functools
from io import StringIO
from typing import Any, Callable, Iterable, Optional

import click
import numpy as np
from rich import box
from rich.console import Console
from rich.table import Table

from eoslab.application.config import apply_config, effective_config, load_config
from eoslab.data.models import UVHyper
from eoslab.data.schema import get_output_path

SEED_MAX = 2**64 - 1


def _table(headers: list[str], rows: Iterable[list[str]]) -> str:
    """Render a simple table using rich."""
    table = Table(show_header=True, header_style="bold", box=box.SIMPLE, expand=True)
    for header in headers:
        table.add_column(header, overflow="fold")
    for row in rows:
        table.add_row(*row)

    buffer = StringIO()
    console = Console(
        force_terminal=False,
        color_system=None,
        width=120,
        soft_wrap=True,
        record=True,
        file=buffer,
    )
    console.print(table)
    return buffer.getvalue().rstrip()


def fmt(value: Any) -> str:
    """Compact display of a summary value."""
    if value is None:
        return "-"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def summary_table(summary: dict[str, Any], keys: Optional[list[str]] = None) -> str:
    """Two-column table of selected summary entries."""
    keys = keys if keys is not None else list(summary)
    return _table(["Field", "Value"], ([key, fmt(summary.get(key))] for key in keys))


class FloatList(click.ParamType):
    """Comma-separated floats, or ``start:stop:count`` for an even grid.

    JSON lists from a config file are accepted as well.
    """

    name = "floats"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]):
        if isinstance(value, (list, tuple)):
            items = list(value)
        elif isinstance(value, str) and value.count(":") == 2:
            start, stop, count = value.split(":")
            try:
                grid = np.linspace(float(start), float(stop), int(count))
            except ValueError:
                self.fail(f"expected start:stop:count, got {value!r}", param, ctx)
            return [float(v) for v in grid]
        else:
            items = [part for part in str(value).split(",") if part.strip()]
        try:
            values = [float(item) for item in items]
        except (TypeError, ValueError):
            self.fail(f"expected comma-separated numbers, got {value!r}", param, ctx)
        if not values:
            self.fail("expected at least one number", param, ctx)
        return values


FLOAT_LIST = FloatList()


def common_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Add ``--seed``, ``--out``, ``--config`` and ``--threads`` to a command.

    Config values are merged under explicit flags, ``out`` is resolved to a
    path and the wrapped function receives the effective configuration as
    ``config``.
    """

    @click.option(
        "--seed",
        type=click.IntRange(0, SEED_MAX),
        default=0,
        show_default=True,
        help="Base random seed.",
    )
    @click.option(
        "--out",
        type=click.Path(dir_okay=False),
        help="Output file (default: $EOSLAB_OUTPUT_DIR or the current directory).",
    )
    @click.option(
        "--config",
        type=click.Path(exists=True, dir_okay=False),
        help="JSON file of option defaults; explicit flags win.",
    )
    @click.option(
        "--threads",
        type=click.IntRange(min=1),
        help="Parallel workers for sweeps (default: available cores).",
    )
    @click.pass_context
    @functools.wraps(func)
    def wrapper(ctx: click.Context, **values: Any) -> Any:
        config_path = values.pop("config")
        if config_path:
            values = apply_config(ctx, values, load_config(config_path))
        values["out"] = get_output_path(ctx.info_name or "", values["out"])
        return func(config=effective_config(ctx.info_name or "", values), **values)

    return wrapper


def hyper_options(with_eta: bool = True) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """UV-model geometry options; ``--eta`` is left out for learning-rate sweeps."""

    def decorate(func: Callable[..., Any]) -> Callable[..., Any]:
        func = click.option("--y", type=float, default=2.0, show_default=True, help="Target.")(
            func
        )
        func = click.option(
            "--neff", type=float, default=1.0, show_default=True, help="Effective width."
        )(func)
        func = click.option(
            "--xnorm", type=float, default=1.0, show_default=True, help="Input norm ||x||."
        )(func)
        if with_eta:
            func = click.option(
                "--eta", type=float, default=0.45, show_default=True, help="Learning rate."
            )(func)
        return func

    return decorate


def build_hyper(eta: float, xnorm: float, neff: float, y: float) -> UVHyper:
    return UVHyper(eta=eta, x_norm=xnorm, n_eff=neff, y=y)


def echo_outcome(title: str, paths: list, table: str) -> None:
    """Print the headline, the summary table and the files written."""
    click.echo(title)
    click.echo(table)
    for path in paths:
        click.echo(f"Wrote {path}")
