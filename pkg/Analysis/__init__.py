"""Aggregate the Littlewood-Paley tools into one module."""

from .littlewood_paley import (
    DyadicRange,
    BesovIndex,
    chi,
    phi,
    block_symbol,
    dyadic_block,
    low_frequency_part,
    lp_norm,
    block_lp_norms,
    besov_norm,
    vector_besov_norm,
    sobolev_norm,
    advective_product,
    verify_bilinear_estimate,
    verify_frac_lap_equiv,
    embedding_ratio,
)
