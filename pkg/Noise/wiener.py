"""Cylindrical Wiener increments and the multiplicative noise operator on the momentum.

Increments come from a counter-based generator (Philox) keyed by the seed, with the fine
step index placed in the counter. No stream is shared between steps, so two trajectories
that use the same (seed, step) see bit-identical increments regardless of call order.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from Spectral import to_spectral, to_physical, helmholtz_project, apply_multiplier
from Utils.errors import ParameterError

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseModel:
    """Diagonal multiplicative noise f(t, u) e_k = weights_k u.

    Attributes:
        k_modes (int): number K of retained Brownian motions
        lam (float): intensity; with the default weights sum(weights^2) = lam^2
        seed (int): 64-bit key of the counter-based generator
        weights (tuple): K weights, default lam / sqrt(K) each
        refinement (int): fine increments per step; a step at dt with refinement r follows
            the same Brownian path as r steps at dt / r with refinement 1
    """

    k_modes: int = 1
    lam: float = 0.0
    seed: int = 0
    weights: tuple = field(default=None)
    refinement: int = 1

    def __post_init__(self):
        """Validate and materialize the default weights."""
        if int(self.k_modes) != self.k_modes or self.k_modes < 1:
            raise ParameterError('k_modes must be a positive integer')
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ParameterError('noise intensity lambda must be finite and nonnegative')
        if int(self.refinement) != self.refinement or self.refinement < 1:
            raise ParameterError('refinement must be a positive integer')
        if self.weights is None:
            object.__setattr__(self, 'weights',
                               (self.lam / math.sqrt(self.k_modes),) * self.k_modes)
        if len(self.weights) != self.k_modes:
            raise ParameterError('expected {} weights, got {}'.format(
                self.k_modes, len(self.weights)))
        if not all(math.isfinite(w) for w in self.weights):
            raise ParameterError('noise weights must be finite')

    @property
    def is_deterministic(self):
        """True if every weight vanishes."""
        return not any(self.weights)

    @property
    def weight_norm_sq(self):
        """Sum of squared weights (the quadratic-variation rate)."""
        return float(sum(w * w for w in self.weights))


@dataclass(frozen=True)
class WienerIncrement:
    """K independent Normal(0, dt) values for one step."""

    step_index: int
    values: np.ndarray

    def weighted_sum(self, model):
        """Return sum_k weights_k dW_k."""
        return float(np.dot(model.weights, self.values))


def _standard_normals(seed, counter, count):
    """Draw count standard normals from the Philox stream at (seed, counter)."""
    key = np.array([seed & SEED_MASK, 0], dtype=np.uint64)
    start = np.array([0, 0, counter, 0], dtype=np.uint64)
    generator = np.random.Generator(np.random.Philox(key=key, counter=start))
    return generator.standard_normal(count)


def sample_increments(model, step, dt):
    """Return the Wiener increment of one step.

    Args:
        model (NoiseModel): noise model (seed, K, refinement)
        step (int): nonnegative step index
        dt (float): step size

    Returns:
        WienerIncrement: K draws distributed Normal(0, dt)
    """
    if not dt > 0:
        raise ParameterError('dt must be positive, got {!r}'.format(dt))
    if step < 0:
        raise ParameterError('step index must be nonnegative')
    r = model.refinement
    fine_scale = math.sqrt(dt / r)
    values = np.zeros(model.k_modes)
    for i in range(r):
        values += fine_scale * _standard_normals(model.seed, step * r + i, model.k_modes)
    return WienerIncrement(step, values)


def apply_noise(u, model, dW):
    """Return P(sum_k weights_k u dW_k).

    Args:
        u (VectorField): divergence-free velocity, physical or spectral
        model (NoiseModel): noise weights
        dW (WienerIncrement): increments of this step

    Returns:
        VectorField: noise term in the representation of u, flagged divergence_free
    """
    factor = dW.weighted_sum(model)
    spectral = u if u.is_spectral else to_spectral(u)
    out = helmholtz_project(apply_multiplier(spectral, factor))
    if u.is_spectral:
        return out
    return to_physical(out)
