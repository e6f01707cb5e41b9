"""Aggregate the grid containers and spectral operators into one module."""

from .grid import SpectralGrid, Field, SpectralField, VectorField
from .operators import (
    to_spectral,
    to_physical,
    apply_multiplier,
    fractional_laplacian,
    fractional_laplacian_symbol,
    negative_power_symbol,
    helmholtz_project,
    friedrichs_mask,
    friedrichs_truncate,
    mollifier_symbol,
    mollify,
    dealias,
    differentiate,
    biot_savart,
    multiply,
    l2_inner,
    l2_norm,
    physical_l2_norm,
    parseval_defect,
    restrict,
)
