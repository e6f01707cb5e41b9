"""State containers, regularization switches and the gravitational potential."""
from dataclasses import dataclass, field, replace

import numpy as np

from Spectral import (Field, SpectralField, VectorField, to_spectral, to_physical,
                      differentiate, dealias, helmholtz_project)
from Utils.errors import GridMismatchError, ParameterError

# Tolerance factor for the positivity regime: min n, min c >= -POSITIVITY_RTOL * max(1, max0)
POSITIVITY_RTOL = 1e-8


@dataclass(frozen=True)
class State:
    """Cell density n, chemical concentration c and velocity u in physical space.

    Attributes:
        n (Field): cell density
        c (Field): chemical concentration
        u (VectorField): physical velocity, divergence free
    """

    n: Field
    c: Field
    u: VectorField

    def __post_init__(self):
        """Check that every field lives on one grid."""
        if self.u.is_spectral:
            raise GridMismatchError('State holds physical fields; got a spectral velocity')
        self.n.grid.check_same(self.c.grid)
        self.n.grid.check_same(self.u.grid)

    @property
    def grid(self):
        """Grid shared by all fields."""
        return self.n.grid

    def is_finite(self):
        """Return True if every sample is finite."""
        return (self.n.is_finite() and self.c.is_finite()
                and all(comp.is_finite() for comp in self.u.components))

    def to_spectral(self):
        """Return the SpectralState of this state."""
        return SpectralState(to_spectral(self.n), to_spectral(self.c), to_spectral(self.u))

    def positivity_tolerance(self):
        """Return tol_pos = 1e-8 * max(1, max n, max c) for this state."""
        peak = max(1.0, float(self.n.samples.max()), float(self.c.samples.max()))
        return POSITIVITY_RTOL * peak

    @classmethod
    def zeros(cls, grid):
        """Return the zero state."""
        return cls(Field.zeros(grid), Field.zeros(grid), VectorField.zeros(grid))


@dataclass(frozen=True)
class SpectralState:
    """Fourier coefficients of (n, c, u); the integrator works in this representation."""

    n: SpectralField
    c: SpectralField
    u: VectorField

    @property
    def grid(self):
        """Grid shared by all fields."""
        return self.n.grid

    def arrays(self):
        """Return the four coefficient arrays (n, c, u1, u2)."""
        return (self.n.coefficients, self.c.coefficients,
                self.u[0].coefficients, self.u[1].coefficients)

    @classmethod
    def from_arrays(cls, grid, arrays):
        """Build a SpectralState from four coefficient arrays (n, c, u1, u2)."""
        n_hat, c_hat, u1_hat, u2_hat = arrays
        velocity = VectorField((SpectralField(grid, u1_hat), SpectralField(grid, u2_hat)),
                               divergence_free=True)
        return cls(SpectralField(grid, n_hat), SpectralField(grid, c_hat), velocity)

    def is_finite(self):
        """Return True if every coefficient is finite."""
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def to_physical(self):
        """Return the physical State."""
        return State(to_physical(self.n), to_physical(self.c), to_physical(self.u))


@dataclass(frozen=True)
class RegularizationParams:
    """Switches for the three approximation layers; None means the layer is OFF.

    All OFF gives the limit system, eps alone the mollified system, all three the truncated
    system with cutoff.

    Attributes:
        eps (float or None): mollifier width
        k_band (float or None): Friedrichs truncation parameter
        r_cut (float or None): cutoff radius R of theta_R
        strict_annulus (bool): truncate n and c on the annulus 1/k <= |xi| <= k as well
    """

    eps: float = None
    k_band: float = None
    r_cut: float = None
    strict_annulus: bool = False

    def __post_init__(self):
        """Validate active layers."""
        for name in ('eps', 'k_band', 'r_cut'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ParameterError('{} must be positive or OFF, got {!r}'.format(name, value))

    @property
    def layer(self):
        """Name of the system the active layers select."""
        if self.eps is None and self.k_band is None and self.r_cut is None:
            return 'limit'
        if self.k_band is None and self.r_cut is None:
            return 'mollified'
        return 'truncated'

    def with_value(self, axis, value):
        """Return a copy with one layer parameter replaced."""
        return replace(self, **{axis: value})


@dataclass(frozen=True)
class Potential:
    """Gravitational potential phi with its precomputed gradient.

    Attributes:
        phi (Field): potential samples
        grad_phi (VectorField): physical gradient of phi
    """

    phi: Field
    grad_phi: VectorField = field(default=None)

    def __post_init__(self):
        """Compute the gradient spectrally unless supplied."""
        if self.grad_phi is None:
            grad = to_physical(differentiate(to_spectral(self.phi), 'grad'))
            object.__setattr__(self, 'grad_phi', grad)
        self.phi.grid.check_same(self.grad_phi.grid)

    @property
    def grid(self):
        """Grid of the potential."""
        return self.phi.grid

    def w1inf_norm(self):
        """Return ||phi||_inf + max |grad phi|."""
        g1, g2 = (c.samples for c in self.grad_phi.components)
        return float(np.max(np.abs(self.phi.samples)) + np.max(np.hypot(g1, g2)))

    def is_zero(self):
        """Return True if grad phi vanishes identically."""
        return not any(np.any(c.samples) for c in self.grad_phi.components)

    @classmethod
    def sinusoidal(cls, grid, g):
        """Return phi = g L / (2 pi) sin(2 pi x2 / L), so that ||grad phi||_inf = g.

        Args:
            grid (SpectralGrid): grid
            g (float): gravity strength

        Returns:
            Potential: default potential
        """
        _, x2 = grid.coordinates
        wave = 2 * np.pi / grid.L
        phi = Field(grid, g / wave * np.sin(wave * x2))
        grad = VectorField((Field.zeros(grid), Field(grid, g * np.cos(wave * x2))))
        return cls(phi, grad)

    @classmethod
    def zero(cls, grid):
        """Return phi = 0."""
        return cls(Field.zeros(grid), VectorField.zeros(grid))


def project_velocity(u):
    """Return the dealiased Helmholtz projection of a physical velocity."""
    return to_physical(helmholtz_project(dealias(to_spectral(u))))
