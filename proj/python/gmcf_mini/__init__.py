"""Desk-scale model-coupling runtime with an LES, a synthetic driver and SOR kernels."""

from ._core import (
    ConfigError,
    NumericalError,
    ProtocolError,
    ShapeError,
    UnsupportedError,
    audit_boundary_coverage,
    boundary_range,
    generate_profile,
    map_boundary_gid,
    padded_range,
    run_coupled,
    run_les_standalone,
    solve_pressure,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "ProtocolError",
    "ShapeError",
    "UnsupportedError",
    "audit_boundary_coverage",
    "boundary_range",
    "generate_profile",
    "map_boundary_gid",
    "padded_range",
    "run_coupled",
    "run_les_standalone",
    "solve_pressure",
]
