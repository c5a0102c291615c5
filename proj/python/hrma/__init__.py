"""Python access to the hrma C++ core."""

from ._core import (
    CauchyData,
    ConfigError,
    a_set,
    builtin,
    conjugate,
    convex_lifespan,
    kinks,
    lower_convex_envelope,
    mass,
    parse_config,
    psi,
)

__all__ = [
    "CauchyData",
    "ConfigError",
    "a_set",
    "builtin",
    "conjugate",
    "convex_lifespan",
    "kinks",
    "lower_convex_envelope",
    "mass",
    "parse_config",
    "psi",
]
