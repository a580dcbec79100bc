"""Worst-case timing analysis and simulation for wormhole networks-on-chip.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. The extension sits inside the package in installed wheels and
next to the build tree when driven by a plain CMake build.
"""

try:
    from ._wormnc import (
        Config,
        ConfigurationError,
        SafetyViolationError,
        UnstableSystemError,
        analyze,
        config_from_json,
        generate,
        interference_graph_dot,
        load_config,
        simulate,
        tightness,
        validate,
        xy_route,
    )
except ImportError:  # plain CMake build: extension on PYTHONPATH
    from _wormnc import (  # type: ignore[no-redef]
        Config,
        ConfigurationError,
        SafetyViolationError,
        UnstableSystemError,
        analyze,
        config_from_json,
        generate,
        interference_graph_dot,
        load_config,
        simulate,
        tightness,
        validate,
        xy_route,
    )

__all__ = [
    "Config",
    "ConfigurationError",
    "SafetyViolationError",
    "UnstableSystemError",
    "analyze",
    "config_from_json",
    "generate",
    "interference_graph_dot",
    "load_config",
    "simulate",
    "tightness",
    "validate",
    "xy_route",
]
