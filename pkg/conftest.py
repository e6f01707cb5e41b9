"""Shared pytest fixtures: small grids, seeded generators and random band-limited fields."""
import numpy as np
import pytest

from Model import State
from Spectral import Field, SpectralGrid, VectorField, helmholtz_project, to_physical, to_spectral


@pytest.fixture
def grid32():
    """32 x 32 grid on [0, 2 pi]^2."""
    return SpectralGrid(32, 2 * np.pi)


@pytest.fixture
def grid64():
    """64 x 64 grid on [0, 2 pi]^2."""
    return SpectralGrid(64, 2 * np.pi)


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20230214)


@pytest.fixture
def random_field(rng):
    """Factory for mean-zero band-limited scalar fields."""
    def make(grid, m_max=5):
        return Field.random_band(grid, rng, m_max)
    return make


@pytest.fixture
def random_velocity(rng):
    """Factory for divergence-free band-limited physical velocities."""
    def make(grid, m_max=5):
        raw = VectorField((Field.random_band(grid, rng, m_max),
                           Field.random_band(grid, rng, m_max)))
        return to_physical(helmholtz_project(to_spectral(raw)))
    return make


@pytest.fixture
def random_state(random_field, random_velocity):
    """Factory for positive n, c around 1 with a random divergence-free velocity."""
    def bump(grid, m_max, spread):
        f = random_field(grid, m_max).samples
        return Field(grid, 1.0 + spread * f / np.max(np.abs(f)))

    def make(grid, m_max=5, spread=0.2):
        n = bump(grid, m_max, spread)
        c = bump(grid, m_max, spread)
        return State(n, c, random_velocity(grid, m_max))
    return make
