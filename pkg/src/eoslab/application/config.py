"""Run configuration: JSON config files merged under explicit flags."""

import json
from pathlib import Path
from typing import Any, Union

import click
import numpy as np
from click.core import ParameterSource

from eoslab import __version__
from eoslab.data.validator import ValidationError

RESERVED_KEYS = ("config",)


class ConfigError(ValidationError):
    """Raised when a config file is unreadable or holds an invalid key or value."""

    pass


def load_config(path: Union[str, Path]) -> dict[str, Any]:
    """Read a JSON object of option defaults.

    Raises:
        ConfigError: If the file cannot be read or is not a JSON object
    """
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as e:
        raise ConfigError(f"config {path}: cannot read file: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path}: invalid JSON: {e.msg} (line {e.lineno})") from e
    if not isinstance(document, dict):
        raise ConfigError(f"config {path}: top level must be a JSON object")
    return document


def apply_config(
    ctx: click.Context, values: dict[str, Any], document: dict[str, Any]
) -> dict[str, Any]:
    """Fill option values from a config document.

    Keys are option flags or parameter names, with dashes or underscores.
    A value from the command line or environment always wins; anything else
    is replaced by the config value converted with the option's own type.

    Args:
        ctx: Context of the running command
        values: Option values as parsed by click
        document: Config document

    Returns:
        New mapping of option values.

    Raises:
        ConfigError: If a key is unknown or its value is rejected by the option type
    """
    merged = dict(values)
    params = _params_by_key(ctx.command)
    for key, raw in document.items():
        param = params.get(key.replace("-", "_"))
        if param is None or param.name in RESERVED_KEYS or param.name is None:
            raise ConfigError(f"config key '{key}': unknown option for '{ctx.info_name}'")
        name = param.name
        source = ctx.get_parameter_source(name)
        if source in (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT):
            continue
        try:
            merged[name] = param.type_cast_value(ctx, raw)
        except (click.BadParameter, TypeError, ValueError) as e:
            detail = e.format_message() if isinstance(e, click.ClickException) else str(e)
            raise ConfigError(f"config key '{key}': {detail}") from None
    return merged


def _params_by_key(command: click.Command) -> dict[str, click.Parameter]:
    params: dict[str, click.Parameter] = {}
    for param in command.params:
        if not param.name:
            continue
        params[param.name] = param
        for opt in param.opts:
            params[opt.lstrip("-").replace("-", "_")] = param
    return params


def _jsonable(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def effective_config(command: str, values: dict[str, Any]) -> dict[str, Any]:
    """Resolved configuration echoed next to every output."""
    return {
        "command": command,
        "version": __version__,
        "options": {key: _jsonable(value) for key, value in sorted(values.items())},
    }
