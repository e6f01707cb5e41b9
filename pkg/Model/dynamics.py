"""Right-hand side of the chemotaxis-fluid system and its regularized variants.

With A = diag(-Laplacian, -Laplacian, (-Laplacian)^alpha), B the transport block and F the
(mollified) chemotaxis, consumption and buoyancy block, the truncated system reads

    d(n, c, u)/dt = -J A J U - theta_R(||U||_{W1,inf}) J B(J U) + theta_R(...) J F(J U).

Layers switched OFF in RegularizationParams turn J, theta_R or the mollifier into the
identity. Quadratic products are dealiased and the momentum terms projected; the velocity
is kept mean-free, so the buoyancy loses its mean mode in every system.
"""
import logging

import numpy as np

from Spectral import (Field, SpectralField, VectorField, to_spectral, to_physical,
                      differentiate, dealias, helmholtz_project, friedrichs_mask, mollify,
                      multiply, fractional_laplacian_symbol, apply_multiplier)
from Utils.errors import ParameterError
from .cutoff import theta_cutoff
from .state import SpectralState

logger = logging.getLogger(__name__)

ALPHA_RANGE = (0.5, 1.0)


def check_alpha(alpha):
    """Raise ParameterError unless alpha lies in [1/2, 1]."""
    if not ALPHA_RANGE[0] <= alpha <= ALPHA_RANGE[1]:
        raise ParameterError('alpha must lie in [1/2, 1], got {!r}'.format(alpha))


def truncation_masks(grid, params):
    """Return the J_k masks (for n and c, for u); (None, None) when k is OFF.

    u is truncated on the annulus 1/k <= |xi| <= k. n and c keep the mean mode (band
    |xi| <= k) unless params.strict_annulus is set.
    """
    if params.k_band is None:
        return None, None
    mask_u = friedrichs_mask(grid, params.k_band, annulus=True)
    if params.strict_annulus:
        return mask_u, mask_u
    return friedrichs_mask(grid, params.k_band, annulus=False), mask_u


def truncate_state(hat, params):
    """Apply J_k component-wise to a SpectralState."""
    mask_nc, mask_u = truncation_masks(hat.grid, params)
    if mask_u is None:
        return hat
    return SpectralState(apply_multiplier(hat.n, mask_nc), apply_multiplier(hat.c, mask_nc),
                         apply_multiplier(hat.u, mask_u))


def linear_symbols(grid, alpha, params):
    """Return the diffusion symbols (mu_n, mu_c, mu_u) of J A J.

    n and c always diffuse with the full Laplacian; u with (-Laplacian)^alpha.
    """
    mask_nc, mask_u = truncation_masks(grid, params)
    mu_nc = grid.k_squared.copy()
    mu_u = fractional_laplacian_symbol(grid, alpha)
    if mask_u is not None:
        mu_nc = mu_nc * mask_nc
        mu_u = mu_u * mask_u
    return mu_nc, mu_nc, mu_u


def _smooth(F, eps):
    if eps is None:
        return F
    return mollify(F, eps)


def _drop_mean(U):
    """Zero the mode-0 coefficient of every component; the velocity stays mean-free."""
    parts = []
    for comp in U.components:
        coeffs = comp.coefficients.copy()
        coeffs[0, 0] = 0.0
        parts.append(SpectralField(comp.grid, coeffs))
    return VectorField(tuple(parts), U.divergence_free)


def _combine(grid, *terms):
    """Sum (weight, SpectralField) pairs into one SpectralField."""
    total = np.zeros((grid.N, grid.N), dtype=complex)
    for weight, term in terms:
        total += weight * term.coefficients
    return SpectralField(grid, total)


def _transport_hat(u, f_hat):
    grad = to_physical(differentiate(f_hat, 'grad'))
    samples = u[0].samples * grad[0].samples + u[1].samples * grad[1].samples
    return dealias(to_spectral(Field(u.grid, samples)))


def transport(u, f):
    """Return dealias(u . grad f), differentiating spectrally and multiplying on the grid.

    Args:
        u (VectorField): physical divergence-free velocity
        f (Field): physical scalar field

    Returns:
        Field: advection term
    """
    u.grid.check_same(f.grid)
    return to_physical(_transport_hat(u, to_spectral(f)))


def w1inf_norm(hat):
    """Return max over components of (max |f| + max |grad f|) for a SpectralState.

    Args:
        hat (SpectralState): state in spectral form

    Returns:
        float: grid approximation of ||(n, c, u)||_{W^{1,inf}}
    """
    best = 0.0
    for comp in (hat.n, hat.c, hat.u[0], hat.u[1]):
        values = to_physical(comp).samples
        grad = to_physical(differentiate(comp, 'grad'))
        slope = np.hypot(grad[0].samples, grad[1].samples)
        best = max(best, float(np.max(np.abs(values)) + np.max(slope)))
    return best


def _transport_block(phys, hat):
    """Return B(U) = (u.grad n, u.grad c, P(u.grad u)) in spectral form."""
    u = phys.u
    adv_u = VectorField((_transport_hat(u, hat.u[0]), _transport_hat(u, hat.u[1])))
    return SpectralState(_transport_hat(u, hat.n), _transport_hat(u, hat.c),
                         helmholtz_project(adv_u))


def _forcing_block(phys, hat, params, potential):
    """Return F^eps(U) in spectral form."""
    grid = hat.grid
    n, c = phys.n, phys.c
    grad_c = to_physical(differentiate(_smooth(hat.c, params.eps), 'grad'))
    flux = VectorField((multiply(n, grad_c[0]), multiply(n, grad_c[1])))
    chemotaxis = differentiate(flux, 'div')
    dn = _combine(grid, (-1.0, chemotaxis), (1.0, hat.n), (-1.0, multiply(n, n)))
    n_smooth = to_physical(_smooth(hat.n, params.eps))
    dc = _combine(grid, (-1.0, multiply(c, n_smooth)))
    if potential is None or potential.is_zero():
        du = VectorField.zeros(grid, spectral=True)
    else:
        g1, g2 = potential.grad_phi.components
        buoyancy = VectorField((multiply(n, g1), multiply(n, g2)))
        du = _drop_mean(helmholtz_project(_smooth(buoyancy, params.eps)))
    return SpectralState(dn, dc, du)


def _scaled_difference(grid, theta, forcing, transport_part):
    """Return theta * (forcing - transport_part) component-wise."""
    n = _combine(grid, (theta, forcing.n), (-theta, transport_part.n))
    c = _combine(grid, (theta, forcing.c), (-theta, transport_part.c))
    u1 = _combine(grid, (theta, forcing.u[0]), (-theta, transport_part.u[0]))
    u2 = _combine(grid, (theta, forcing.u[1]), (-theta, transport_part.u[1]))
    return SpectralState(n, c, VectorField((u1, u2), divergence_free=True))


def cutoff_factor(hat, params):
    """Return theta_R(||U||_{W1,inf}) evaluated on the pre-step state."""
    if params.r_cut is None:
        return 1.0
    return theta_cutoff(w1inf_norm(hat), params.r_cut)


def nonlinear_tendency(hat, params, potential):
    """Return -theta J B(J U) + theta J F(J U) in spectral form.

    Args:
        hat (SpectralState): current state
        params (RegularizationParams): active layers
        potential (Potential or None): gravitational potential

    Returns:
        SpectralState: nonlinear and forcing tendency
    """
    theta = cutoff_factor(hat, params)
    if theta == 0.0:
        return SpectralState.from_arrays(hat.grid, [np.zeros_like(a) for a in hat.arrays()])
    truncated = truncate_state(hat, params)
    phys = truncated.to_physical()
    forcing = _forcing_block(phys, truncated, params, potential)
    transport_part = _transport_block(phys, truncated)
    return truncate_state(_scaled_difference(hat.grid, theta, forcing, transport_part), params)


def forcing_F(state, params, potential):
    """Return F^eps(state) = (dn, dc, du) as physical fields.

    dn = -div(n (grad c * rho)) + n - n^2, dc = -c (n * rho),
    du = P((n grad phi) * rho) less its mean;
    eps OFF makes the convolutions identities.

    Args:
        state (State): physical state
        params (RegularizationParams): only eps is used
        potential (Potential or None): gravitational potential

    Returns:
        (Field, Field, VectorField): forcing tendencies
    """
    forcing = _forcing_block(state, state.to_spectral(), params, potential)
    return to_physical(forcing.n), to_physical(forcing.c), to_physical(forcing.u)


def rhs(state, params, potential, alpha):
    """Return the full tendency (dn, dc, du) of the selected system.

    Args:
        state (State): physical state
        params (RegularizationParams): active layers
        potential (Potential or None): gravitational potential
        alpha (float): fluid dissipation exponent in [1/2, 1]

    Returns:
        (Field, Field, VectorField): tendencies in physical space
    """
    check_alpha(alpha)
    hat = state.to_spectral()
    mu_n, mu_c, mu_u = linear_symbols(state.grid, alpha, params)
    nonlinear = nonlinear_tendency(hat, params, potential)
    total = [-mu * a + b for mu, a, b in zip((mu_n, mu_c, mu_u, mu_u),
                                              hat.arrays(), nonlinear.arrays())]
    out = SpectralState.from_arrays(state.grid, total).to_physical()
    return out.n, out.c, out.u


def vorticity_rhs(state, potential, params, alpha):
    """Return the tendency of v = curl2d(u).

    -J (-Laplacian)^alpha v - theta J (u_k . grad v_k) + theta J curl2d(P(n_k grad phi) * rho)
    with u_k = J u; all layers OFF reduce it to the vorticity equation of the limit system.

    Args:
        state (State): physical state
        potential (Potential or None): gravitational potential
        params (RegularizationParams): active layers
        alpha (float): fluid dissipation exponent in [1/2, 1]

    Returns:
        Field: vorticity tendency
    """
    check_alpha(alpha)
    grid = state.grid
    hat = state.to_spectral()
    _, _, mu_u = linear_symbols(grid, alpha, params)
    v_hat = differentiate(hat.u, 'curl2d')
    total = -mu_u * v_hat.coefficients
    theta = cutoff_factor(hat, params)
    if theta != 0.0:
        truncated = truncate_state(hat, params)
        u_k = to_physical(truncated.u)
        v_k = differentiate(truncated.u, 'curl2d')
        _, mask_u = truncation_masks(grid, params)
        advection = _transport_hat(u_k, v_k).coefficients
        forcing = np.zeros_like(total)
        if potential is not None and not potential.is_zero():
            n_k = to_physical(truncated.n)
            g1, g2 = potential.grad_phi.components
            buoyancy = VectorField((multiply(n_k, g1), multiply(n_k, g2)))
            forcing = differentiate(_smooth(buoyancy, params.eps), 'curl2d').coefficients
        nonlinear = theta * (forcing - advection)
        if mask_u is not None:
            nonlinear = nonlinear * mask_u
        total = total + nonlinear
    return to_physical(SpectralField(grid, total))


def regularize_initial(state, params):
    """Return the initial data of the regularized system: (J_k (U * rho^eps)), u re-projected.

    Args:
        state (State): raw initial state
        params (RegularizationParams): active layers

    Returns:
        State: regularized initial state
    """
    hat = state.to_spectral()
    if params.eps is not None:
        hat = SpectralState(mollify(hat.n, params.eps), mollify(hat.c, params.eps),
                            mollify(hat.u, params.eps))
    hat = truncate_state(hat, params)
    hat = SpectralState(hat.n, hat.c, helmholtz_project(hat.u))
    if params.layer != 'limit':
        logger.info('regularized initial data for the %s system', params.layer)
    return hat.to_physical()


def _hs_inner(a, b, grid, s):
    weight = (1.0 + grid.k_squared) ** s
    return float(grid.area * np.real(np.sum(weight * a * np.conj(b))))


def _hs_pairing(tendency, hat, s):
    grid = hat.grid
    return sum(_hs_inner(a, b, grid, s) for a, b in zip(tendency.arrays(), hat.arrays()))


def transport_hs_ratio(state, s):
    """Return |(B(U), U)_{H^s}| / (||grad U||_inf ||U||_{H^s}^2).

    Args:
        state (State): physical state with divergence-free u
        s (float): Sobolev index

    Returns:
        float: measured constant of the transport commutator bound
    """
    hat = state.to_spectral()
    pairing = abs(_hs_pairing(_transport_block(state, hat), hat, s))
    slope = 0.0
    for comp in (hat.n, hat.c, hat.u[0], hat.u[1]):
        grad = to_physical(differentiate(comp, 'grad'))
        slope = max(slope, float(np.max(np.hypot(grad[0].samples, grad[1].samples))))
    norm_sq = _hs_pairing(hat, hat, s)
    if slope == 0 or norm_sq == 0:
        return 0.0
    return pairing / (slope * norm_sq)


def forcing_hs_ratio(state, params, potential, s):
    """Return |(F^eps(U), U)_{H^s}| / (||U||_{W1,inf} ||U||_{H^s}^2)."""
    hat = state.to_spectral()
    pairing = abs(_hs_pairing(_forcing_block(state, hat, params, potential), hat, s))
    norm_sq = _hs_pairing(hat, hat, s)
    size = w1inf_norm(hat)
    if size == 0 or norm_sq == 0:
        return 0.0
    return pairing / (size * norm_sq)


def momentum_forcing(hat, params, potential):
    """Return the momentum forcing theta J P((n_k grad phi) * rho) in spectral form.

    Args:
        hat (SpectralState): current state
        params (RegularizationParams): active layers
        potential (Potential or None): gravitational potential

    Returns:
        VectorField: spectral forcing of the velocity equation
    """
    theta = cutoff_factor(hat, params)
    if theta == 0.0 or potential is None or potential.is_zero():
        return VectorField.zeros(hat.grid, spectral=True)
    truncated = truncate_state(hat, params)
    n_k = to_physical(truncated.n)
    g1, g2 = potential.grad_phi.components
    buoyancy = VectorField((multiply(n_k, g1), multiply(n_k, g2)))
    forcing = apply_multiplier(_drop_mean(helmholtz_project(_smooth(buoyancy, params.eps))),
                               theta)
    _, mask_u = truncation_masks(hat.grid, params)
    if mask_u is not None:
        forcing = apply_multiplier(forcing, mask_u)
    return forcing
