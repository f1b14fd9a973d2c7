"""Python bindings for the sipovl SIP overload simulator."""

from ._sipovl import (
    Config,
    ConfigParseError,
    ConfigValidationError,
    OverloadPredicate,
    WindowController,
    derive_seed,
    detect_overload,
    export,
    run,
    sweep,
)

__all__ = [
    "Config",
    "ConfigParseError",
    "ConfigValidationError",
    "OverloadPredicate",
    "WindowController",
    "derive_seed",
    "detect_overload",
    "export",
    "run",
    "sweep",
]
