"""Aggregate the state containers, presets and right-hand-side assembly into one module."""

from .state import (State, SpectralState, RegularizationParams, Potential, project_velocity,
                    POSITIVITY_RTOL)
from .cutoff import theta_cutoff
from .dynamics import (
    check_alpha,
    truncation_masks,
    truncate_state,
    linear_symbols,
    transport,
    w1inf_norm,
    cutoff_factor,
    nonlinear_tendency,
    forcing_F,
    rhs,
    vorticity_rhs,
    regularize_initial,
    transport_hs_ratio,
    forcing_hs_ratio,
    momentum_forcing,
)
from .presets import PRESETS, PresetBase, build_preset
