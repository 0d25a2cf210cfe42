"""Factory for creating dataset sources.

Provides a registry of source kinds and the ``kind:arg,arg,...`` spec
string grammar used on the command line.
"""

from typing import Any, Callable, Optional, Type

from eoslab.data.models import Activation, NetworkConfig, Parameterization, PowerLawSpec
from eoslab.sources.base import DatasetFormatError, DatasetSource
from eoslab.sources.synthetic import (
    PowerLawSource,
    RandomSource,
    SingleExampleSource,
    TeacherStudentSource,
)
from eoslab.sources.tabular import CsvSource


class SourceFactory:
    """Factory for creating dataset sources.

    Example:
        factory = SourceFactory()
        factory.register('random', RandomSource)
        source = factory.create_source('random', 256, 64, 1)
    """

    def __init__(self):
        """Initialize factory with empty registry."""
        self._registry: dict[str, Type[DatasetSource]] = {}

    def register(self, kind: str, source_class: Type[DatasetSource]) -> None:
        """Register a dataset source type.

        Args:
            kind: Name used in spec strings (e.g., 'random', 'power-law')
            source_class: Class implementing DatasetSource

        Raises:
            ValueError: If kind is already registered.
            TypeError: If source_class does not implement DatasetSource.
        """
        if kind in self._registry:
            raise ValueError(f"Dataset kind '{kind}' is already registered")

        if not issubclass(source_class, DatasetSource):
            raise TypeError(
                f"Source class must implement DatasetSource, got {source_class.__name__}"
            )

        self._registry[kind] = source_class

    def create_source(self, kind: str, *args: Any, **kwargs: Any) -> DatasetSource:
        """Create a source instance of the given kind.

        Raises:
            ValueError: If kind is not registered.
        """
        if kind not in self._registry:
            available = ", ".join(self._registry.keys()) if self._registry else "none"
            raise ValueError(
                f"Dataset kind '{kind}' is not registered. Available kinds: {available}"
            )
        return self._registry[kind](*args, **kwargs)

    def is_registered(self, kind: str) -> bool:
        return kind in self._registry

    def list_kinds(self) -> list[str]:
        """List all registered kinds."""
        return list(self._registry.keys())


# Global factory instance
_default_factory: Optional[SourceFactory] = None


def get_factory() -> SourceFactory:
    """Get the default global factory with the built-in kinds registered."""
    global _default_factory
    if _default_factory is None:
        _default_factory = SourceFactory()
        for kind, source_class in BUILTIN_SOURCES.items():
            _default_factory.register(kind, source_class)
    return _default_factory


def create_source(kind: str, *args: Any, **kwargs: Any) -> DatasetSource:
    """Convenience function to create a source using the default factory."""
    return get_factory().create_source(kind, *args, **kwargs)


BUILTIN_SOURCES: dict[str, Type[DatasetSource]] = {
    "random": RandomSource,
    "teacher": TeacherStudentSource,
    "power-law": PowerLawSource,
    "single": SingleExampleSource,
    "csv": CsvSource,
}


def _typed(text: str, field: str, cast: Callable[[str], Any]) -> Any:
    try:
        return cast(text.strip())
    except ValueError:
        raise DatasetFormatError(f"dataset {field}: cannot parse {text!r}") from None


def _flag(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "header"):
        return True
    if value in ("0", "false", "no", ""):
        return False
    raise ValueError(text)


def _arity(kind: str, args: list[str], minimum: int, maximum: int, usage: str) -> None:
    if not minimum <= len(args) <= maximum:
        raise DatasetFormatError(f"dataset '{kind}': expected {usage}, got {len(args)} values")


def _random_args(args: list[str]) -> tuple[tuple, dict]:
    _arity("random", args, 3, 3, "P,d_in,d_out")
    return tuple(_typed(a, name, int) for a, name in zip(args, ("P", "d_in", "d_out"))), {}


def _teacher_args(args: list[str]) -> tuple[tuple, dict]:
    _arity("teacher", args, 3, 8, "P,d_in,d_out[,depth,width,activation,param,sigma_w2]")
    dims = tuple(_typed(a, name, int) for a, name in zip(args[:3], ("P", "d_in", "d_out")))
    extra = args[3:] + [""] * (5 - len(args[3:]))
    teacher = NetworkConfig(
        depth=_typed(extra[0] or "2", "depth", int),
        width=_typed(extra[1] or "16", "width", int),
        activation=_typed(extra[2] or "linear", "activation", Activation),
        parameterization=_typed(extra[3] or "sp", "param", Parameterization),
        sigma_w2=_typed(extra[4] or "1", "sigma_w2", float),
    )
    return dims + (teacher,), {}


def _power_law_args(args: list[str]) -> tuple[tuple, dict]:
    _arity("power-law", args, 3, 7, "P,d_in,d_out[,A_x,B_x,A_y,B_y]")
    dims = tuple(_typed(a, name, int) for a, name in zip(args[:3], ("P", "d_in", "d_out")))
    defaults = ["1", "0", "1", "0"]
    values = args[3:] + defaults[len(args[3:]) :]
    names = ("A_x", "B_x", "A_y", "B_y")
    spec = PowerLawSpec(**{n: _typed(v, n, float) for n, v in zip(names, values)})
    return dims + (spec,), {}


def _single_args(args: list[str]) -> tuple[tuple, dict]:
    _arity("single", args, 2, 3, "norm,y[,dim]")
    norm = _typed(args[0], "norm", float)
    y = _typed(args[1], "y", float)
    dim = _typed(args[2], "dim", int) if len(args) == 3 else 1
    return (norm, y, dim), {}


def _csv_args(args: list[str]) -> tuple[tuple, dict]:
    _arity("csv", args, 3, 4, "path,d_in,d_out[,header]")
    d_in = _typed(args[1], "d_in", int)
    d_out = _typed(args[2], "d_out", int)
    header = _typed(args[3], "header", _flag) if len(args) == 4 else False
    return (args[0].strip(), d_in, d_out, header), {}


_SPEC_PARSERS: dict[str, Callable[[list[str]], tuple[tuple, dict]]] = {
    "random": _random_args,
    "teacher": _teacher_args,
    "power-law": _power_law_args,
    "single": _single_args,
    "csv": _csv_args,
}


def parse_dataset_spec(text: str, factory: Optional[SourceFactory] = None) -> DatasetSource:
    """Create a source from a ``kind:arg,arg,...`` string.

    Grammar:
        single:<norm>,<y>[,<dim>]
        random:<P>,<d_in>,<d_out>
        power-law:<P>,<d_in>,<d_out>[,<A_x>,<B_x>,<A_y>,<B_y>]
        teacher:<P>,<d_in>,<d_out>[,<depth>,<width>,<activation>,<param>,<sigma_w2>]
        csv:<path>,<d_in>,<d_out>[,<header>]

    Raises:
        DatasetFormatError: If the string does not follow the grammar
    """
    factory = factory or get_factory()
    kind, sep, rest = text.partition(":")
    kind = kind.strip()
    if not sep or not kind:
        raise DatasetFormatError(f"dataset: expected 'kind:args', got {text!r}")
    if kind not in _SPEC_PARSERS or not factory.is_registered(kind):
        raise DatasetFormatError(
            f"dataset: unknown kind {kind!r}, expected one of {sorted(_SPEC_PARSERS)}"
        )
    args, kwargs = _SPEC_PARSERS[kind](rest.split(",") if rest else [])
    return factory.create_source(kind, *args, **kwargs)
