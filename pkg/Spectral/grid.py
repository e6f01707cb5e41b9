"""Torus geometry and the field containers that live on it.

Samples are stored as N x N arrays indexed [i, j] with x1 = i * L / N along axis 0 and
x2 = j * L / N along axis 1. Fourier coefficients use the same layout in FFT order, so the
coefficient at array index (a, b) belongs to mode m = (fftfreq index a, fftfreq index b).
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

import Utils
from Utils.errors import GridMismatchError, ParameterError


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic square [0, L]^2 sampled with N points per side.

    Attributes:
        points_per_side (int): N, positive and even
        side_length (float): L, period of the torus
        dealias_fraction (float): fraction of N/2 kept by the dealias mask, in (0, 1]
    """

    points_per_side: int
    side_length: float = 2 * np.pi * 8
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        """Validate the geometry."""
        if int(self.points_per_side) != self.points_per_side or self.points_per_side <= 0:
            raise ParameterError('points_per_side must be a positive integer')
        if self.points_per_side % 2:
            raise ParameterError('points_per_side must be even')
        if not self.side_length > 0:
            raise ParameterError('side_length must be positive')
        if not 0 < self.dealias_fraction <= 1:
            raise ParameterError('dealias_fraction must lie in (0, 1]')

    @property
    def N(self):
        """Grid points per side."""
        return self.points_per_side

    @property
    def L(self):
        """Side length."""
        return self.side_length

    @property
    def spacing(self):
        """Distance between neighbouring sample points."""
        return self.side_length / self.points_per_side

    @property
    def cell_area(self):
        """Quadrature weight of one sample."""
        return self.spacing ** 2

    @property
    def area(self):
        """Area of the torus."""
        return self.side_length ** 2

    @cached_property
    def mode_index(self):
        """Integer mode indices in FFT order, {0..N/2-1, -N/2..-1}."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).round().astype(int)

    @cached_property
    def modes(self):
        """Pair (m1, m2) of N x N integer arrays."""
        return tuple(np.meshgrid(self.mode_index, self.mode_index, indexing='ij'))

    @cached_property
    def xi(self):
        """Pair of wavenumber arrays xi = m / L in cycles per unit length."""
        m1, m2 = self.modes
        return (m1 / self.L, m2 / self.L)

    @cached_property
    def xi_norm(self):
        """|xi(m)| on the grid."""
        xi1, xi2 = self.xi
        return np.hypot(xi1, xi2)

    @cached_property
    def k_squared(self):
        """Symbol (2 pi |xi|)^2 of -Laplacian."""
        return (2 * np.pi * self.xi_norm) ** 2

    @cached_property
    def derivative_wavenumbers(self):
        """Pair of arrays 2 pi m / L with the Nyquist index zeroed.

        On N points the Nyquist index stands for both +N/2 and -N/2, so its first
        derivative is zero; every differential operator, the projection and Biot-Savart use
        these wavenumbers, which keeps their outputs real.
        """
        nyquist = self.N // 2
        out = []
        for m in self.modes:
            k = 2 * np.pi * m / self.L
            out.append(np.where(np.abs(m) == nyquist, 0.0, k))
        return tuple(out)

    @cached_property
    def derivative_k_squared(self):
        """Symbol k1^2 + k2^2 of -div grad built on the derivative wavenumbers."""
        k1, k2 = self.derivative_wavenumbers
        return k1 ** 2 + k2 ** 2

    @cached_property
    def derivative_null_modes(self):
        """Boolean mask of the modes m != 0 on which every first derivative vanishes.

        These are the pure Nyquist modes (N/2, 0), (0, N/2) and (N/2, N/2).
        """
        null = self.derivative_k_squared == 0
        null[0, 0] = False
        return null

    @cached_property
    def dealias_mask(self):
        """Boolean mask keeping modes with |m_i| <= dealias_fraction * N / 2."""
        cut = self.dealias_fraction * self.N / 2
        m1, m2 = self.modes
        return (np.abs(m1) <= cut) & (np.abs(m2) <= cut)

    @cached_property
    def coordinates(self):
        """Pair (x1, x2) of N x N sample coordinate arrays."""
        x = np.arange(self.N) * self.spacing
        return tuple(np.meshgrid(x, x, indexing='ij'))

    @cached_property
    def smallest_wavenumber(self):
        """Smallest nonzero |xi| on the grid."""
        return 1.0 / self.L

    @cached_property
    def largest_wavenumber(self):
        """Largest |xi| on the grid."""
        return float(self.xi_norm.max())

    def check_same(self, other):
        """Raise GridMismatchError unless other describes the same grid.

        Args:
            other (SpectralGrid): grid to compare with
        """
        if self != other:
            raise GridMismatchError('grid mismatch: {} vs {}'.format(self, other))


@dataclass(frozen=True)
class Field:
    """Real scalar samples on a grid (physical space)."""

    grid: SpectralGrid
    samples: np.ndarray

    def __post_init__(self):
        """Check the sample array shape."""
        shape = (self.grid.N, self.grid.N)
        if np.shape(self.samples) != shape:
            raise GridMismatchError(
                'samples of shape {} on a grid of shape {}'.format(np.shape(self.samples), shape))

    def is_finite(self):
        """Return True if all samples are finite."""
        return bool(np.all(np.isfinite(self.samples)))

    @classmethod
    def zeros(cls, grid):
        """Return the zero field on grid."""
        return cls(grid, np.zeros((grid.N, grid.N)))

    @classmethod
    def constant(cls, grid, value):
        """Return the constant field equal to value."""
        return cls(grid, np.full((grid.N, grid.N), float(value)))

    @classmethod
    def random_band(cls, grid, rng, m_max):
        """Return a real mean-zero random field with modes |m_i| <= m_max.

        Args:
            grid (SpectralGrid): target grid, N > 2 * m_max
            rng (np.random.Generator): source of randomness
            m_max (int): largest mode index per axis

        Returns:
            Field: band-limited samples
        """
        coeffs = Utils.embed_band_coefficients(Utils.random_band_coefficients(rng, m_max), grid.N)
        samples = scipy.fft.ifft2(coeffs * grid.N ** 2, workers=Utils.fft_workers()).real
        return cls(grid, samples - samples.mean())


@dataclass(frozen=True)
class SpectralField:
    """Fourier-series coefficients of a scalar field, indexed by mode in FFT order."""

    grid: SpectralGrid
    coefficients: np.ndarray

    def __post_init__(self):
        """Check the coefficient array shape."""
        shape = (self.grid.N, self.grid.N)
        if np.shape(self.coefficients) != shape:
            raise GridMismatchError(
                'coefficients of shape {} on a grid of shape {}'.format(
                    np.shape(self.coefficients), shape))

    def hermitian_defect(self):
        """Return max |coeff(-m) - conj(coeff(m))| over all modes, indices taken mod N."""
        c = self.coefficients
        flipped = np.roll(c[::-1, ::-1], 1, axis=(0, 1))
        return float(np.max(np.abs(flipped - np.conj(c))))

    @classmethod
    def zeros(cls, grid):
        """Return the zero spectrum on grid."""
        return cls(grid, np.zeros((grid.N, grid.N), dtype=complex))


@dataclass(frozen=True)
class VectorField:
    """Pair of scalar components, both physical (Field) or both spectral (SpectralField).

    Attributes:
        components (tuple): (u1, u2)
        divergence_free (bool): set by helmholtz_project and Biot-Savart inversion
    """

    components: tuple
    divergence_free: bool = False

    def __post_init__(self):
        """Check both components share a grid and a representation."""
        if len(self.components) != 2:
            raise GridMismatchError('a 2D vector field needs exactly two components')
        first, second = self.components
        if type(first) is not type(second):
            raise GridMismatchError('components mix physical and spectral representations')
        first.grid.check_same(second.grid)

    @property
    def grid(self):
        """Grid shared by both components."""
        return self.components[0].grid

    @property
    def is_spectral(self):
        """True if the components are SpectralField."""
        return isinstance(self.components[0], SpectralField)

    def __getitem__(self, index):
        """Return component index (0 or 1)."""
        return self.components[index]

    @classmethod
    def zeros(cls, grid, spectral=False):
        """Return the zero vector field, flagged divergence free."""
        make = SpectralField.zeros if spectral else Field.zeros
        return cls((make(grid), make(grid)), divergence_free=True)
