"""Aggregate the noise model into one module."""

from .wiener import NoiseModel, WienerIncrement, sample_increments, apply_noise
