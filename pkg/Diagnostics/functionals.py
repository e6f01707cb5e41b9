"""Per-state functionals: mass, entropy, sqrt(c) energies, velocity and vorticity norms.

All integrals are equal-weight grid quadratures; derivatives are spectral.
"""
from dataclasses import dataclass, fields, astuple
import logging

import numpy as np

from Analysis import sobolev_norm
from Model import check_alpha, linear_symbols, momentum_forcing, RegularizationParams
from Spectral import (Field, to_spectral, to_physical, differentiate, l2_norm, l2_inner,
                      physical_l2_norm, fractional_laplacian_symbol)
from Utils.errors import PreconditionError

logger = logging.getLogger(__name__)

# n ln n is taken as 0 below this level
ENTROPY_FLOOR = 1e-300
# delta_floor = DELTA_FLOOR_RTOL * max c when not given
DELTA_FLOOR_RTOL = 1e-10


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Time-stamped functionals of one state, in CSV column order."""

    t: float
    mass_n: float
    l2_n: float
    l3_n3: float
    h1_n: float
    entropy: float
    weighted_moment: float
    mass_c: float
    linf_c: float
    l1_c: float
    grad_sqrt_c: float
    lap_sqrt_c: float
    quartic_c: float
    l2_u: float
    l4_u4: float
    dissipation_u: float
    l2_v: float
    l43_v: float
    halpha_v: float
    min_n: float
    min_c: float
    energy_residual: float
    negative_count: int
    delta_floor: float

    @classmethod
    def columns(cls):
        """Return the CSV header in column order."""
        return [f.name for f in fields(cls)]

    def as_row(self):
        """Return the values in column order."""
        return list(astuple(self))

    def is_finite(self):
        """Return True if every entry is finite."""
        return all(np.isfinite(v) for v in astuple(self))


def _sqrt_c_derivatives(c):
    """Return (sqrt(c+), |grad sqrt c|^2, Laplacian sqrt c) on the grid."""
    root = np.sqrt(np.maximum(c.samples, 0.0))
    root_hat = to_spectral(Field(c.grid, root))
    grad = to_physical(differentiate(root_hat, 'grad'))
    grad_sq = grad[0].samples ** 2 + grad[1].samples ** 2
    lap = to_physical(differentiate(root_hat, 'laplacian')).samples
    return root, grad_sq, lap


def _distance_to_center(grid):
    x1, x2 = grid.coordinates
    center = grid.L / 2
    return np.hypot(x1 - center, x2 - center)


def compute_record(state, t, alpha, delta_floor=None, energy_residual=0.0):
    """Evaluate every functional on one state.

    Args:
        state (State): physical state
        t (float): time stamp
        alpha (float): fluid dissipation exponent in [1/2, 1]
        delta_floor (float, optional): regularization of 1/c in quartic_c
        energy_residual (float): residual of the step that produced state

    Returns:
        DiagnosticsRecord: the record
    """
    check_alpha(alpha)
    grid = state.grid
    cell = grid.cell_area
    n, c = state.n.samples, state.c.samples
    u1, u2 = (comp.samples for comp in state.u.components)
    if delta_floor is None:
        delta_floor = DELTA_FLOOR_RTOL * max(float(c.max()), np.finfo(float).tiny)

    negative_count = int(np.count_nonzero(n < 0) + np.count_nonzero(c < 0))
    if negative_count:
        logger.debug('t=%r: %d negative samples clipped in diagnostics', t, negative_count)

    positive = n > ENTROPY_FLOOR
    n_log_n = np.where(positive, n * np.log(np.where(positive, n, 1.0)), 0.0)

    _, grad_sq, lap_root = _sqrt_c_derivatives(state.c)
    c_clipped = np.maximum(c, 0.0)

    u_hat = to_spectral(state.u)
    mu = fractional_laplacian_symbol(grid, alpha)
    v_hat = differentiate(u_hat, 'curl2d')
    v = to_physical(v_hat).samples
    speed_sq = u1 ** 2 + u2 ** 2
    dissipation = grid.area * sum(float(np.sum(mu * np.abs(comp.coefficients) ** 2))
                                  for comp in u_hat.components)
    halpha_v = np.sqrt(grid.area * float(np.sum(mu * np.abs(v_hat.coefficients) ** 2)))

    return DiagnosticsRecord(
        t=float(t),
        mass_n=cell * float(np.sum(np.abs(n))),
        l2_n=physical_l2_norm(state.n),
        l3_n3=cell * float(np.sum(np.abs(n) ** 3)),
        h1_n=sobolev_norm(state.n, 1.0),
        entropy=cell * float(np.sum(n_log_n)),
        weighted_moment=cell * float(np.sum(_distance_to_center(grid) * n)),
        mass_c=cell * float(np.sum(c)),
        linf_c=float(np.max(np.abs(c))),
        l1_c=cell * float(np.sum(np.abs(c))),
        grad_sqrt_c=cell * float(np.sum(grad_sq)),
        lap_sqrt_c=cell * float(np.sum(lap_root ** 2)),
        quartic_c=cell * float(np.sum(grad_sq ** 2 / (c_clipped + delta_floor))),
        l2_u=physical_l2_norm(state.u),
        l4_u4=cell * float(np.sum(speed_sq ** 2)),
        dissipation_u=float(dissipation),
        l2_v=l2_norm(v_hat),
        l43_v=cell * float(np.sum(np.abs(v) ** (4.0 / 3.0))),
        halpha_v=float(halpha_v),
        min_n=float(n.min()),
        min_c=float(c.min()),
        energy_residual=float(energy_residual),
        negative_count=negative_count,
        delta_floor=float(delta_floor),
    )


def energy_budget_residual(prev, nxt, dt, alpha, potential, lam, params=None,
                           noise_increment=None):
    """Return the residual of the Ito energy balance of 1/2 ||u||^2 over one step.

    residual = 1/2 ||u+||^2 - 1/2 ||u||^2 + D - dt <u, forcing>
               - lam^2 / 2 ||u||^2 dt - s ||u||^2,

    where D = 1/2 L^2 sum (1 - exp(-2 mu dt)) |u_hat|^2 is the dissipation of the exact
    integrating factor (dt ||(-Laplacian)^(alpha/2) u||^2 + O(dt^2)) and s = sum_k w_k dW_k.
    The noise terms are dropped when lam = 0; the martingale term only when s is given.

    Args:
        prev (State): state before the step
        nxt (State): state after the step
        dt (float): step size
        alpha (float): fluid dissipation exponent
        potential (Potential or None): gravitational potential
        lam (float): noise intensity (sum of squared weights is lam^2)
        params (RegularizationParams, optional): active layers, default all OFF
        noise_increment (float, optional): s of the step

    Returns:
        float: magnitude of the residual
    """
    params = params or RegularizationParams()
    grid = prev.grid
    prev_hat = prev.to_spectral()
    u_prev = prev_hat.u
    u_next = to_spectral(nxt.u)
    _, _, mu_u = linear_symbols(grid, alpha, params)
    damping = 1.0 - np.exp(-2.0 * mu_u * dt)
    dissipation = 0.5 * grid.area * sum(float(np.sum(damping * np.abs(comp.coefficients) ** 2))
                                         for comp in u_prev.components)
    energy_prev = 0.5 * l2_norm(u_prev) ** 2
    energy_next = 0.5 * l2_norm(u_next) ** 2
    work = dt * l2_inner(u_prev, momentum_forcing(prev_hat, params, potential))
    residual = energy_next - energy_prev + dissipation - work
    if lam > 0:
        residual -= 0.5 * lam ** 2 * (2.0 * energy_prev) * dt
        if noise_increment is not None:
            residual -= noise_increment * 2.0 * energy_prev
    return abs(residual)


def chain_rule_identity_check(c, floor=1e-12):
    """Return the relative L^2 error of Lap c = 2 sqrt(c) Lap sqrt(c) + 2 |grad sqrt(c)|^2.

    Args:
        c (Field): strictly positive field
        floor (float): smallest admissible sample

    Returns:
        float: ||lhs - rhs|| / ||lhs|| (absolute error when lhs vanishes)
    """
    if float(c.samples.min()) < floor:
        raise PreconditionError('chain rule check needs c >= {!r} everywhere'.format(floor))
    lhs = to_physical(differentiate(to_spectral(c), 'laplacian')).samples
    root, grad_sq, lap_root = _sqrt_c_derivatives(c)
    rhs = 2.0 * root * lap_root + 2.0 * grad_sq
    error = np.sqrt(np.sum((lhs - rhs) ** 2))
    scale = np.sqrt(np.sum(lhs ** 2))
    if scale == 0:
        return float(error)
    return float(error / scale)
