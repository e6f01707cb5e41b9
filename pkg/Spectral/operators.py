"""Fourier-space operators on the periodic grid.

Coefficients follow the Fourier-series normalization

    coeff(m) = (1 / N^2) * sum_x samples(x) * exp(-2 pi i m . x / L),

so the mode-0 coefficient is the mean of the field. Every operator here is a pure
function of its inputs; the grid caches its wavenumber tables on first use.

Differential operators (grad, div, curl2d, laplacian), the projection and Biot-Savart all
use the derivative wavenumbers, whose Nyquist index is zero, so div(grad f) equals
laplacian(f) on every mode. The diffusion symbols (fractional_laplacian, mollifier) keep the
full |xi| and therefore differ from laplacian only on the Nyquist row and column.
"""
import numpy as np
import scipy.fft

import Utils
from Utils.errors import GridMismatchError, ParameterError, PreconditionError
from .grid import Field, SpectralField, VectorField

DIFFERENTIAL_OPS = ('grad', 'div', 'curl2d', 'laplacian')


def _require_spectral(F):
    if not isinstance(F, SpectralField):
        raise GridMismatchError('expected a SpectralField, got {}'.format(type(F).__name__))


def _require_spectral_vector(U):
    if not isinstance(U, VectorField) or not U.is_spectral:
        raise GridMismatchError('expected a spectral VectorField')


def to_spectral(f):
    """Transform samples to Fourier-series coefficients.

    Args:
        f (Field or VectorField): physical-space field

    Returns:
        SpectralField or VectorField: coefficients in FFT order
    """
    if isinstance(f, VectorField):
        return VectorField(tuple(to_spectral(c) for c in f.components), f.divergence_free)
    if not isinstance(f, Field):
        raise GridMismatchError('expected a Field, got {}'.format(type(f).__name__))
    n_sq = f.grid.N ** 2
    coeffs = scipy.fft.fft2(f.samples, workers=Utils.fft_workers()) / n_sq
    return SpectralField(f.grid, coeffs)


def to_physical(F):
    """Transform Fourier-series coefficients back to real samples.

    Args:
        F (SpectralField or VectorField): spectral field

    Returns:
        Field or VectorField: real part of the inverse transform
    """
    if isinstance(F, VectorField):
        return VectorField(tuple(to_physical(c) for c in F.components), F.divergence_free)
    _require_spectral(F)
    n_sq = F.grid.N ** 2
    samples = scipy.fft.ifft2(F.coefficients * n_sq, workers=Utils.fft_workers()).real
    return Field(F.grid, samples)


def apply_multiplier(F, symbol):
    """Multiply every coefficient by a real symbol array (diagonal Fourier multiplier).

    Args:
        F (SpectralField or VectorField): spectral input
        symbol (np.ndarray): N x N multiplier

    Returns:
        SpectralField or VectorField: multiplied field; the divergence-free flag survives
    """
    if isinstance(F, VectorField):
        _require_spectral_vector(F)
        return VectorField(tuple(apply_multiplier(c, symbol) for c in F.components),
                           F.divergence_free)
    _require_spectral(F)
    return SpectralField(F.grid, F.coefficients * symbol)


def fractional_laplacian_symbol(grid, alpha):
    """Return the symbol (2 pi |xi|)^(2 alpha) with mode 0 mapped to 0.

    Args:
        grid (SpectralGrid): grid
        alpha (float): exponent, finite and nonnegative

    Returns:
        np.ndarray: N x N real symbol
    """
    if not np.isfinite(alpha) or alpha < 0:
        raise ParameterError('alpha must be finite and nonnegative, got {!r}'.format(alpha))
    k = 2 * np.pi * grid.xi_norm
    symbol = np.power(k, 2 * alpha, where=k > 0, out=np.zeros_like(k))
    return symbol


def fractional_laplacian(F, alpha):
    """Apply (-Laplacian)^alpha.

    Args:
        F (SpectralField or VectorField): spectral input
        alpha (float): exponent, nonnegative (the fluid regime is [1/2, 1])

    Returns:
        SpectralField or VectorField: (2 pi |m| / L)^(2 alpha) * coeff(m), mode 0 removed
    """
    return apply_multiplier(F, fractional_laplacian_symbol(F.grid, alpha))


def negative_power_symbol(grid, power):
    """Return |2 pi xi|^power for power < 0 with mode 0 dropped (set to 0)."""
    k = 2 * np.pi * grid.xi_norm
    return np.power(k, power, where=k > 0, out=np.zeros_like(k))


def projection_tensor(grid):
    """Return the entries (p11, p12, p22) of Id - xi xi^T / |xi|^2 per mode.

    Derivative wavenumbers are used so that div(P u) vanishes exactly on the grid. Modes
    whose derivative wavenumber vanishes (mode 0, pure Nyquist) keep the identity.
    """
    k1, k2 = grid.derivative_wavenumbers
    k_sq = grid.derivative_k_squared
    safe = np.where(k_sq > 0, k_sq, 1.0)
    p11 = np.where(k_sq > 0, 1.0 - k1 * k1 / safe, 1.0)
    p12 = np.where(k_sq > 0, -k1 * k2 / safe, 0.0)
    p22 = np.where(k_sq > 0, 1.0 - k2 * k2 / safe, 1.0)
    return p11, p12, p22


def helmholtz_project(U):
    """Apply the Helmholtz-Leray projection onto divergence-free fields.

    Args:
        U (VectorField): spectral vector field

    Returns:
        VectorField: projected field, flagged divergence_free
    """
    _require_spectral_vector(U)
    p11, p12, p22 = projection_tensor(U.grid)
    a, b = U[0].coefficients, U[1].coefficients
    first = SpectralField(U.grid, p11 * a + p12 * b)
    second = SpectralField(U.grid, p12 * a + p22 * b)
    return VectorField((first, second), divergence_free=True)


def friedrichs_mask(grid, k, annulus=True):
    """Return the indicator of 1/k <= |xi| <= k (or |xi| <= k without the lower cut).

    Args:
        grid (SpectralGrid): grid
        k (float): band parameter, positive
        annulus (bool): keep the lower cut 1/k (removes the mean mode)

    Returns:
        np.ndarray: N x N float mask of zeros and ones
    """
    if not k > 0:
        raise ParameterError('truncation parameter k must be positive')
    xi = grid.xi_norm
    keep = xi <= k
    if annulus:
        keep &= xi >= 1.0 / k
    return keep.astype(float)


def friedrichs_truncate(F, k, annulus=True):
    """Apply the sharp frequency truncation J_k.

    Args:
        F (SpectralField or VectorField): spectral input
        k (float): band parameter
        annulus (bool): use the annulus 1/k <= |xi| <= k; False keeps the band [0, k]

    Returns:
        SpectralField or VectorField: truncated field
    """
    return apply_multiplier(F, friedrichs_mask(F.grid, k, annulus))


def mollifier_symbol(grid, eps):
    """Return the Gaussian mollifier multiplier exp(-eps^2 (2 pi |xi|)^2)."""
    if not eps > 0:
        raise ParameterError('mollifier width eps must be positive')
    return np.exp(-(eps ** 2) * grid.k_squared)


def mollify(F, eps):
    """Convolve with the Gaussian mollifier of width eps.

    Args:
        F (SpectralField or VectorField): spectral input
        eps (float): mollifier width

    Returns:
        SpectralField or VectorField: mollified field (mean preserved)
    """
    return apply_multiplier(F, mollifier_symbol(F.grid, eps))


def dealias(F):
    """Zero all modes outside the dealias mask.

    Args:
        F (SpectralField or VectorField): spectral input

    Returns:
        SpectralField or VectorField: masked field
    """
    return apply_multiplier(F, F.grid.dealias_mask.astype(float))


def differentiate(F, op):
    """Apply a first- or second-order differential operator spectrally.

    Args:
        F (SpectralField or VectorField): spectral input; div and curl2d need a vector
        op (str): one of 'grad', 'div', 'curl2d', 'laplacian'

    Returns:
        SpectralField or VectorField: grad returns a vector, the others a scalar
    """
    if op not in DIFFERENTIAL_OPS:
        raise ParameterError('unknown differential operator {!r}'.format(op))
    if op in ('div', 'curl2d'):
        _require_spectral_vector(F)
        k1, k2 = F.grid.derivative_wavenumbers
        a, b = F[0].coefficients, F[1].coefficients
        if op == 'div':
            return SpectralField(F.grid, 1j * (k1 * a + k2 * b))
        return SpectralField(F.grid, 1j * (k1 * b - k2 * a))
    _require_spectral(F)
    if op == 'laplacian':
        return SpectralField(F.grid, -F.grid.derivative_k_squared * F.coefficients)
    k1, k2 = F.grid.derivative_wavenumbers
    return VectorField((SpectralField(F.grid, 1j * k1 * F.coefficients),
                        SpectralField(F.grid, 1j * k2 * F.coefficients)))


def biot_savart(v, atol=1e-12):
    """Recover the divergence-free velocity whose curl is the vorticity v.

    u_hat(m) = -i xi_perp v_hat(m) / (2 pi |xi|^2) with xi_perp = (-xi2, xi1), built on the
    derivative wavenumbers. A real grid velocity has no curl on mode 0 nor on the pure
    Nyquist modes, so content there is rejected.

    Args:
        v (SpectralField): scalar vorticity with zero mean and no pure Nyquist content
        atol (float): tolerance on those coefficients, scaled by max |coeff|

    Returns:
        VectorField: spectral velocity flagged divergence_free
    """
    _require_spectral(v)
    coeffs = v.coefficients
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    if abs(coeffs[0, 0]) > atol * scale:
        raise PreconditionError('vorticity has nonzero mean on the torus')
    if np.any(np.abs(coeffs[v.grid.derivative_null_modes]) > atol * scale):
        raise PreconditionError('vorticity has content on a pure Nyquist mode, which is not '
                                'the curl of any real grid velocity')
    k1, k2 = v.grid.derivative_wavenumbers
    k_sq = v.grid.derivative_k_squared
    inv = np.where(k_sq > 0, 1.0 / np.where(k_sq > 0, k_sq, 1.0), 0.0)
    # psi solves -Laplacian psi = v; u = (d2 psi, -d1 psi)
    psi = coeffs * inv
    u1 = SpectralField(v.grid, 1j * k2 * psi)
    u2 = SpectralField(v.grid, -1j * k1 * psi)
    return VectorField((u1, u2), divergence_free=True)


def multiply(f, g):
    """Pseudo-spectral product of two physical fields, dealiased.

    Args:
        f (Field): first factor
        g (Field): second factor

    Returns:
        SpectralField: dealias(to_spectral(f * g))
    """
    f.grid.check_same(g.grid)
    return dealias(to_spectral(Field(f.grid, f.samples * g.samples)))


def l2_inner(F, G):
    """Return the L^2 inner product of two real fields given spectrally.

    Vector fields pair component-wise. Uses <f, g> = L^2 * sum_m f_hat(m) conj(g_hat(m)).
    """
    if isinstance(F, VectorField):
        return sum(l2_inner(a, b) for a, b in zip(F.components, G.components))
    F.grid.check_same(G.grid)
    return float(F.grid.area * np.real(np.sum(F.coefficients * np.conj(G.coefficients))))


def l2_norm(F):
    """Return the L^2 norm of a spectral field (scalar or vector)."""
    return float(np.sqrt(max(l2_inner(F, F), 0.0)))


def physical_l2_norm(f):
    """Return the L^2 norm of a physical field by grid quadrature."""
    if isinstance(f, VectorField):
        return float(np.sqrt(sum(physical_l2_norm(c) ** 2 for c in f.components)))
    return float(np.sqrt(f.grid.cell_area * np.sum(f.samples ** 2)))


def parseval_defect(f):
    """Return the relative defect of Parseval's identity for one physical field.

    Compares (L/N)^2 * sum |samples|^2 with L^2 * sum |coeff|^2.
    """
    lhs = physical_l2_norm(f) ** 2
    rhs = l2_norm(to_spectral(f)) ** 2
    return abs(lhs - rhs) / max(lhs, np.finfo(float).tiny)


def restrict(F, coarse_grid):
    """Copy the coefficients of F that a coarser grid can hold.

    Modes with |m_i| < N_coarse / 2 are copied; the coarse Nyquist row and column are
    left at zero so the restricted field stays real.

    Args:
        F (SpectralField or VectorField): spectral field on a fine grid
        coarse_grid (SpectralGrid): target grid with the same side length

    Returns:
        SpectralField or VectorField: field on coarse_grid
    """
    if isinstance(F, VectorField):
        return VectorField(tuple(restrict(c, coarse_grid) for c in F.components),
                           F.divergence_free)
    _require_spectral(F)
    if coarse_grid.L != F.grid.L or coarse_grid.N > F.grid.N:
        raise GridMismatchError('restriction needs the same L and a coarser grid')
    half = coarse_grid.N // 2
    keep = np.arange(-half + 1, half)
    fine_idx = keep % F.grid.N
    coarse_idx = keep % coarse_grid.N
    out = np.zeros((coarse_grid.N, coarse_grid.N), dtype=complex)
    out[np.ix_(coarse_idx, coarse_idx)] = F.coefficients[np.ix_(fine_idx, fine_idx)]
    return SpectralField(coarse_grid, out)
