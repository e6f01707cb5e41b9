"""Littlewood-Paley blocks, Besov and Sobolev norms on the periodic grid.

Partition of unity (see docs/littlewood_paley.md):

    chi(r) = s((4/3 - r) / (7/12)),   phi(r) = chi(r / 2) - chi(r),

where s is Utils.smooth_transition. chi = 1 on [0, 3/4], chi = 0 on [4/3, inf), so phi is
supported in the annulus 3/4 <= r <= 8/3 and sum_j phi(2^-j r) = 1 for r > 0. Blocks act on
|xi| = |m| / L. Homogeneous norms sum over the blocks the grid can resolve, the finite-band
surrogate of the sum over all integers j.
"""
from dataclasses import dataclass
import math

import numpy as np

import Utils
from Spectral import (Field, SpectralField, VectorField, to_spectral, to_physical,
                      differentiate, dealias, apply_multiplier, fractional_laplacian)
from Utils.errors import ParameterError, PreconditionError, UndefinedRatioError

CHI_INNER = 3.0 / 4.0
CHI_OUTER = 4.0 / 3.0
ANNULUS = (3.0 / 4.0, 8.0 / 3.0)

BILINEAR_VARIANTS = ('general', 'three_quarter', 'lipschitz')


def chi(r):
    """Low-frequency bump: 1 for r <= 3/4, 0 for r >= 4/3."""
    return Utils.smooth_transition((CHI_OUTER - np.asarray(r, dtype=float))
                                   / (CHI_OUTER - CHI_INNER))


def phi(r):
    """Dyadic annulus bump phi(r) = chi(r/2) - chi(r)."""
    r = np.asarray(r, dtype=float)
    return chi(r / 2.0) - chi(r)


@dataclass(frozen=True)
class DyadicRange:
    """Inclusive range of block indices that are nonzero somewhere on a grid."""

    j_min: int
    j_max: int

    def __post_init__(self):
        """Check ordering."""
        if self.j_min > self.j_max:
            raise ParameterError('empty dyadic range')

    def __iter__(self):
        """Iterate over block indices."""
        return iter(range(self.j_min, self.j_max + 1))

    def __contains__(self, j):
        """Return True if j lies in the range."""
        return self.j_min <= j <= self.j_max

    @classmethod
    def for_grid(cls, grid):
        """Return the range of blocks with nonzero support on grid."""
        xi = grid.xi_norm[grid.xi_norm > 0]
        lo = math.floor(math.log2(xi.min())) - 3
        hi = math.ceil(math.log2(xi.max())) + 3
        active = [j for j in range(lo, hi + 1)
                  if np.any((xi > ANNULUS[0] * 2.0 ** j) & (xi < ANNULUS[1] * 2.0 ** j))]
        return cls(min(active), max(active))


@dataclass(frozen=True)
class BesovIndex:
    """Parameters (s, p, r) of a Besov norm.

    Attributes:
        s (float): regularity
        p (float): integrability in [1, inf]
        r (float): summation index in [1, inf]
        homogeneous (bool): exclude the mean mode and sum over resolved blocks only
    """

    s: float
    p: float = 2.0
    r: float = 2.0
    homogeneous: bool = True

    def __post_init__(self):
        """Validate p and r."""
        for name in ('p', 'r'):
            value = getattr(self, name)
            if not (value >= 1 or value == math.inf):
                raise ParameterError('{} must lie in [1, inf], got {!r}'.format(name, value))


def _spectral(f):
    if isinstance(f, SpectralField):
        return f
    return to_spectral(f)


def block_symbol(grid, j):
    """Return the multiplier phi(2^-j |xi|) of block j."""
    return phi(grid.xi_norm * 2.0 ** (-j))


def dyadic_block(F, j):
    """Return the homogeneous Littlewood-Paley block of index j.

    Args:
        F (SpectralField): spectral input
        j (int): block index; blocks outside the grid range are identically zero

    Returns:
        SpectralField: coefficients multiplied by phi(2^-j xi)
    """
    return apply_multiplier(F, block_symbol(F.grid, j))


def low_frequency_part(F):
    """Return chi(|xi|) F, the inhomogeneous low-frequency block (contains the mean)."""
    return apply_multiplier(F, chi(F.grid.xi_norm))


def lp_norm(f, p):
    """Return the L^p norm of a physical field by equal-weight quadrature.

    Args:
        f (Field): samples
        p (float): exponent in [1, inf]

    Returns:
        float: norm
    """
    values = np.abs(f.samples)
    if p == math.inf:
        return float(values.max())
    return float((f.grid.cell_area * np.sum(values ** p)) ** (1.0 / p))


def _lr_sum(terms, r):
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0
    if r == math.inf:
        return float(terms.max())
    return float(np.sum(terms ** r) ** (1.0 / r))


def block_lp_norms(f, p, dyadic_range=None):
    """Return [(j, ||block_j f||_{L^2}, ||block_j f||_{L^p})] over the grid's dyadic range.

    Args:
        f (Field or SpectralField): input field
        p (float): integrability of the second norm column
        dyadic_range (DyadicRange, optional): range to scan

    Returns:
        list: one tuple per block
    """
    F = _spectral(f)
    dyadic_range = dyadic_range or DyadicRange.for_grid(F.grid)
    rows = []
    for j in dyadic_range:
        block = to_physical(dyadic_block(F, j))
        rows.append((j, lp_norm(block, 2), lp_norm(block, p)))
    return rows


def besov_norm(f, idx):
    """Return the Besov norm of a scalar field.

    Args:
        f (Field or SpectralField): input field
        idx (BesovIndex): (s, p, r, homogeneous)

    Returns:
        float: l^r over j of 2^(j s) ||block_j f||_{L^p}
    """
    F = _spectral(f)
    terms = []
    if idx.homogeneous:
        for j in DyadicRange.for_grid(F.grid):
            block = to_physical(dyadic_block(F, j))
            terms.append(2.0 ** (j * idx.s) * lp_norm(block, idx.p))
    else:
        terms.append(2.0 ** (-idx.s) * lp_norm(to_physical(low_frequency_part(F)), idx.p))
        for j in DyadicRange.for_grid(F.grid):
            if j < 0:
                continue
            block = to_physical(dyadic_block(F, j))
            terms.append(2.0 ** (j * idx.s) * lp_norm(block, idx.p))
    return _lr_sum(terms, idx.r)


def vector_besov_norm(U, idx):
    """Return the sum over components of the Besov norms of a vector field."""
    return sum(besov_norm(c, idx) for c in U.components)


def sobolev_norm(f, s):
    """Return the Bessel-potential norm ||(1 - Laplacian)^(s/2) f||_{L^2}.

    Args:
        f (Field or SpectralField): input field
        s (float): regularity

    Returns:
        float: L * sqrt(sum_m (1 + (2 pi |m| / L)^2)^s |f_hat(m)|^2)
    """
    F = _spectral(f)
    weight = (1.0 + F.grid.k_squared) ** s
    return float(F.grid.L * np.sqrt(np.sum(weight * np.abs(F.coefficients) ** 2)))


def _ratio(numerator, denominator):
    if numerator == 0:
        return 0.0
    if denominator == 0 or not np.isfinite(denominator):
        raise UndefinedRatioError('verification ratio has a vanishing denominator')
    return numerator / denominator


def advective_product(f, g):
    """Return the dealiased product f . grad g as a SpectralField.

    Args:
        f (VectorField): physical vector field
        g (Field): physical scalar field

    Returns:
        SpectralField: dealias(f1 d1 g + f2 d2 g)
    """
    grad_g = to_physical(differentiate(to_spectral(g), 'grad'))
    samples = f[0].samples * grad_g[0].samples + f[1].samples * grad_g[1].samples
    return dealias(to_spectral(Field(g.grid, samples)))


def verify_bilinear_estimate(f, g, alpha, p=2.0, r=2.0, variant='general'):
    """Return the ratio of the two sides of a bilinear Besov estimate.

    Variants:
        general:        ||f.grad g||_{B^-alpha} / (||f||_{B^(1-2alpha+2/p)} ||g||_{B^alpha})
        three_quarter:  ||f.grad g||_{B^-3/4} / (||f||_{B^(-1/4+2/p)} ||g||_{B^1/2})
        lipschitz:      ||f.grad g||_{B^-1/4} / (||grad g||_{L^inf} ||f||_{B^3/4})

    All Besov norms are homogeneous with indices (p, r). The inequality holds with some
    finite constant; the ratio is what gets recorded.

    Args:
        f (VectorField): physical vector field
        g (Field): physical scalar field
        alpha (float): exponent in (1/2, 1] for the general variant
        p (float): integrability
        r (float): summation index
        variant (str): one of BILINEAR_VARIANTS

    Returns:
        float: nonnegative ratio
    """
    if variant not in BILINEAR_VARIANTS:
        raise ParameterError('unknown bilinear variant {!r}'.format(variant))
    two_over_p = 0.0 if p == math.inf else 2.0 / p
    product = advective_product(f, g)
    if variant == 'general':
        if not 0.5 < alpha <= 1.0:
            raise ParameterError('alpha must lie in (1/2, 1], got {!r}'.format(alpha))
        numerator = besov_norm(product, BesovIndex(-alpha, p, r))
        denominator = (vector_besov_norm(f, BesovIndex(1 - 2 * alpha + two_over_p, p, r))
                       * besov_norm(g, BesovIndex(alpha, p, r)))
    elif variant == 'three_quarter':
        numerator = besov_norm(product, BesovIndex(-0.75, p, r))
        denominator = (vector_besov_norm(f, BesovIndex(-0.25 + two_over_p, p, r))
                       * besov_norm(g, BesovIndex(0.5, p, r)))
    else:
        grad_g = to_physical(differentiate(to_spectral(g), 'grad'))
        lip = float(np.max(np.hypot(grad_g[0].samples, grad_g[1].samples)))
        numerator = besov_norm(product, BesovIndex(-0.25, p, r))
        denominator = lip * vector_besov_norm(f, BesovIndex(0.75, p, r))
    return _ratio(numerator, denominator)


def verify_frac_lap_equiv(f, s, alpha, p=2.0, r=2.0, mean_tol=1e-12):
    """Return both ratios of ||(-Lap)^alpha f||_{B^s} and ||f||_{B^(s+2 alpha)}.

    The ratios include the factor (2 pi)^(2 alpha) of the Fourier convention.

    Args:
        f (Field or SpectralField): mean-zero field
        s (float): regularity of the left-hand norm
        alpha (float): exponent of the fractional Laplacian
        p (float): integrability
        r (float): summation index
        mean_tol (float): tolerance on |mean| relative to max |coeff|

    Returns:
        (float, float): ratio and its reciprocal
    """
    F = _spectral(f)
    scale = float(np.max(np.abs(F.coefficients)))
    if scale == 0:
        raise UndefinedRatioError('zero field has no norm ratio')
    if abs(F.coefficients[0, 0]) > mean_tol * scale:
        raise PreconditionError('fractional Laplacian equivalence needs a mean-zero field')
    lhs = besov_norm(fractional_laplacian(F, alpha), BesovIndex(s, p, r))
    rhs = besov_norm(F, BesovIndex(s + 2 * alpha, p, r))
    if lhs == 0 or rhs == 0:
        raise UndefinedRatioError('fractional Laplacian ratio has a vanishing side')
    return lhs / rhs, rhs / lhs


def embedding_ratio(f, s, r=2.0):
    """Return ||f||_{B^(s-1)_{inf,r}} / ||f||_{B^s_{2,r}}, the measured embedding constant."""
    numerator = besov_norm(f, BesovIndex(s - 1, math.inf, r))
    denominator = besov_norm(f, BesovIndex(s, 2.0, r))
    return _ratio(numerator, denominator)
