"""Exact spin-1 (Duffin-Kemmer) modes in Lobachevsky space H3, horospherical coordinates,
with finite-difference verification of the field equations they solve."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    FieldPoint,
    christoffel_at,
    christoffel_numeric,
    metric_at,
    ricci_rotation,
    tetrad_covariant_derivative,
)
from .modes import (  # noqa: E402
    QuantumNumbers,
    build_mode_massless_gradient,
    build_mode_sigma,
    build_mode_sigma0_massive,
    dispersion_residual,
)
from .verify import Grid, residual_helicity, residual_system, richardson, verify_mode  # noqa: E402

__all__ = [
    "FieldPoint",
    "Grid",
    "QuantumNumbers",
    "build_mode_massless_gradient",
    "build_mode_sigma",
    "build_mode_sigma0_massive",
    "christoffel_at",
    "christoffel_numeric",
    "dispersion_residual",
    "metric_at",
    "residual_helicity",
    "residual_system",
    "ricci_rotation",
    "richardson",
    "tetrad_covariant_derivative",
    "verify_mode",
]
