"""Command-line interface entrypoints for eoslab."""

from eoslab.cli.main import cli, run

__all__ = ["cli", "run"]
