"""Two solutions driven by one Brownian path, and the functionals of their difference.

With bars for differences and v = curl2d(u):

    E       = ||(n, c, u, grad c, v)||^2                                (alpha > 1/2)
    E_tilde = ||(n, c, u, grad c, (-Lap)^(-1/8) v)||^2                  (alpha = 1/2)
    F_alpha = ||(grad n, grad c, (-Lap)^(alpha/2) u, Lap c, (-Lap)^(alpha/2) v)||^2
    F_tilde = ||(grad n, grad c, (-Lap)^(1/4) u, Lap c, (-Lap)^(1/8) v)||^2

all squared L^2 norms of the difference of the two states.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

import Utils
from Analysis import sobolev_norm
from Model import SpectralState, State, build_preset, w1inf_norm
from Solver import ExponentialStepper
from Spectral import (VectorField, differentiate, fractional_laplacian_symbol,
                      negative_power_symbol, l2_norm, to_physical)
from Utils.errors import ParameterError

logger = logging.getLogger(__name__)

# the envelope fit ignores records with t < ENVELOPE_SKIP_STEPS * dt
ENVELOPE_SKIP_STEPS = 5


@dataclass(frozen=True)
class CouplingRecord:
    """Difference functionals of two coupled solutions at one time."""

    t: float
    E: float
    E_tilde: float
    F_alpha: float
    F_tilde: float
    gronwall_H: float
    aux: dict = field(default_factory=dict, compare=False)

    CSV_COLUMNS = ('t', 'E', 'E_tilde', 'F_alpha', 'F_tilde', 'gronwall_H')

    def as_row(self):
        """Return the values in CSV column order."""
        return [getattr(self, name) for name in self.CSV_COLUMNS]


@dataclass(frozen=True)
class CouplingReport:
    """Exponential envelope of E (or E_tilde) along a coupled run.

    Attributes:
        rate (float): fitted a in E(t) ~ E(0) exp(a t) on t >= 5 dt
        r_squared (float): quality of the log-linear fit
        envelope_rate (float): max over t > 0 of log(E(t) / E(0)) / t
        max_w1inf (tuple): largest ||U||_{W1,inf} reached by each solution
        r_cut (float or None): the cutoff radius used by the run
    """

    rate: float
    r_squared: float
    envelope_rate: float
    max_w1inf: tuple
    r_cut: float

    @property
    def stayed_below_cutoff(self):
        """True if both solutions stayed below the cutoff radius (or no cutoff is set)."""
        if self.r_cut is None:
            return True
        return max(self.max_w1inf) <= self.r_cut


@dataclass
class CouplingSeries:
    """Records of a coupled run with its envelope report."""

    records: list
    report: CouplingReport


def _norm_sq(F):
    return l2_norm(F) ** 2


def _weighted_norm_sq(F, symbol):
    """Return L^2 sum symbol |F_hat|^2 for a scalar or vector spectral field."""
    components = F.components if isinstance(F, VectorField) else (F,)
    return sum(F.grid.area * float(np.sum(symbol * np.abs(c.coefficients) ** 2))
               for c in components)


def _difference(hat1, hat2):
    arrays = [a - b for a, b in zip(hat1.arrays(), hat2.arrays())]
    return SpectralState.from_arrays(hat1.grid, arrays)


def difference_functionals(hat1, hat2, alpha):
    """Return (E, E_tilde, F_alpha, F_tilde) of the difference of two spectral states.

    Args:
        hat1 (SpectralState): first solution
        hat2 (SpectralState): second solution
        alpha (float): fluid dissipation exponent

    Returns:
        tuple: the four functionals
    """
    hat1.grid.check_same(hat2.grid)
    grid = hat1.grid
    diff = _difference(hat1, hat2)
    v = differentiate(diff.u, 'curl2d')
    grad_n = differentiate(diff.n, 'grad')
    grad_c = differentiate(diff.c, 'grad')
    lap_c = differentiate(diff.c, 'laplacian')

    base = _norm_sq(diff.n) + _norm_sq(diff.c) + _norm_sq(diff.u) + _norm_sq(grad_c)
    E = base + _norm_sq(v)
    E_tilde = base + _weighted_norm_sq(v, negative_power_symbol(grid, -0.5))

    gradients = _norm_sq(grad_n) + _norm_sq(grad_c) + _norm_sq(lap_c)
    mu = fractional_laplacian_symbol(grid, alpha / 2.0)
    F_alpha = gradients + _weighted_norm_sq(diff.u, mu ** 2) + _weighted_norm_sq(v, mu ** 2)
    quarter = fractional_laplacian_symbol(grid, 0.25)
    eighth = fractional_laplacian_symbol(grid, 0.125)
    F_tilde = (gradients + _weighted_norm_sq(diff.u, quarter ** 2)
               + _weighted_norm_sq(v, eighth ** 2))
    return E, E_tilde, F_alpha, F_tilde


def _solution_norms(hat, alpha):
    """Return the L^2-type norms the Gronwall coefficients are built from."""
    grid = hat.grid
    v = differentiate(hat.u, 'curl2d')
    grad_u = sum(_norm_sq(differentiate(comp, 'grad')) for comp in hat.u.components)
    return {
        'n': l2_norm(hat.n),
        'grad_n': l2_norm(differentiate(hat.n, 'grad')),
        'c': l2_norm(hat.c),
        'grad_c': l2_norm(differentiate(hat.c, 'grad')),
        'lap_c': l2_norm(differentiate(hat.c, 'laplacian')),
        'c_h2': sobolev_norm(hat.c, 2.0),
        'c_linf': float(np.max(np.abs(_physical(hat.c)))),
        'grad_u': math.sqrt(grad_u),
        'v_halpha': math.sqrt(_weighted_norm_sq(v, fractional_laplacian_symbol(grid, alpha))),
    }


def _physical(F):
    return to_physical(F).samples


def gronwall_terms(hat1, hat2, alpha):
    """Return the Gronwall coefficient and its auxiliary sums as a dict.

    alpha > 1/2: H = 1 + ||n1||^2 ||grad n1||^2 + ||grad c1||^2 ||Lap c1||^2
        + ||n2||^2 ||grad n2||^2 + ||grad c1|| ||Lap c1|| + ||c2||^2 + ||n1||^2 + ||grad u2||^2
        + ||c2||^2_{H^2} + ||v1||^2_{H^alpha} + ||grad u1||, next to the auxiliary sums
        F1 = 1 + ||n1||^2 ||grad n1||^2 + ||grad c1||^2 ||Lap c1||^2 + ||n2||^2 ||grad n2||^2
        F2 = 1 + ||grad c1|| ||Lap c1|| + ||c2||^2 + ||n1||^2
        F3 = ||grad c1||^2 ||Lap c1||^2 + ||grad u2||^2 + ||c2||^2_{H^2}
             + ||n1||^2 ||grad n1||^2 + 1
    alpha = 1/2: G = G2 + G3 - 1 with
        G2 = ||n1||^{3/2} ||grad n1||^{3/2} + ||n2||^2 ||grad n2||^2 + ||Lap c1||^2 + 1
        G3 = ||grad c1||^{3/2} ||Lap c1||^{3/2} + ||grad u2||^2 + ||c2||^2_{L^inf}
             + ||n1||^2 ||grad n1||^2 + 1

    Returns:
        dict: 'value' plus the auxiliary sums
    """
    a = _solution_norms(hat1, alpha)
    b = _solution_norms(hat2, alpha)
    if alpha > 0.5:
        F1 = 1.0 + (a['n'] * a['grad_n']) ** 2 + (a['grad_c'] * a['lap_c']) ** 2 \
            + (b['n'] * b['grad_n']) ** 2
        F2 = 1.0 + a['grad_c'] * a['lap_c'] + b['c'] ** 2 + a['n'] ** 2
        F3 = (a['grad_c'] * a['lap_c']) ** 2 + b['grad_u'] ** 2 + b['c_h2'] ** 2 \
            + (a['n'] * a['grad_n']) ** 2 + 1.0
        H = (1.0 + (a['n'] * a['grad_n']) ** 2 + (a['grad_c'] * a['lap_c']) ** 2
             + (b['n'] * b['grad_n']) ** 2 + a['grad_c'] * a['lap_c'] + b['c'] ** 2
             + a['n'] ** 2 + b['grad_u'] ** 2 + b['c_h2'] ** 2 + a['v_halpha'] ** 2
             + a['grad_u'])
        return {'value': H, 'F1': F1, 'F2': F2, 'F3': F3}
    G2 = (a['n'] * a['grad_n']) ** 1.5 + (b['n'] * b['grad_n']) ** 2 + a['lap_c'] ** 2 + 1.0
    G3 = (a['grad_c'] * a['lap_c']) ** 1.5 + b['grad_u'] ** 2 + b['c_linf'] ** 2 \
        + (a['n'] * a['grad_n']) ** 2 + 1.0
    return {'value': G2 + G3 - 1.0, 'G2': G2, 'G3': G3}


def gronwall_coefficient(state1, state2, alpha):
    """Evaluate the Gronwall coefficient of the uniqueness estimate.

    H for alpha > 1/2, G for alpha = 1/2; both equal 1 on zero states. The formula mixes
    the two solutions asymmetrically, so swapping them changes the value in general.

    Args:
        state1 (State): first solution
        state2 (State): second solution
        alpha (float): fluid dissipation exponent in [1/2, 1]

    Returns:
        float: coefficient value
    """
    return gronwall_terms(state1.to_spectral(), state2.to_spectral(), alpha)['value']


def _record(t, hat1, hat2, alpha):
    E, E_tilde, F_alpha, F_tilde = difference_functionals(hat1, hat2, alpha)
    terms = gronwall_terms(hat1, hat2, alpha)
    value = terms.pop('value')
    return CouplingRecord(t, E, E_tilde, F_alpha, F_tilde, value, terms)


def envelope_report(records, dt, alpha, max_w1inf=(0.0, 0.0), r_cut=None):
    """Fit E(t) ~ E(0) exp(a t) on t >= 5 dt.

    Uses E for alpha > 1/2 and E_tilde for alpha = 1/2. Records with E = 0 are left out of
    the fit; with fewer than two usable points the rate and R^2 are NaN.

    Args:
        records (list): CouplingRecord series in time order
        dt (float): step size of the run
        alpha (float): fluid dissipation exponent
        max_w1inf (tuple): largest W1,inf norms reached by the two solutions
        r_cut (float or None): cutoff radius of the run

    Returns:
        CouplingReport: envelope summary
    """
    key = 'E' if alpha > 0.5 else 'E_tilde'
    values = np.array([getattr(r, key) for r in records])
    times = np.array([r.t for r in records])
    start = ENVELOPE_SKIP_STEPS * dt * (1 - 1e-9)
    usable = (times >= start) & (values > 0)
    if np.count_nonzero(usable) >= 2:
        rate, r_squared = Utils.fit_exponential(times[usable], values[usable])
    else:
        rate, r_squared = math.nan, math.nan
    envelope = math.nan
    if values[0] > 0:
        later = (times > 0) & (values > 0)
        if np.any(later):
            envelope = float(np.max(np.log(values[later] / values[0]) / times[later]))
    return CouplingReport(rate, r_squared, envelope, tuple(max_w1inf), r_cut)


def coupled_run(init1, init2, cfg):
    """Advance two states in lockstep on one Brownian path.

    Both states use the same step indices, so sample_increments returns the identical
    increment to each of them. A record is emitted at t = 0, every diagnostics_every
    steps and at the final step.

    Args:
        init1 (State): first initial state
        init2 (State): second initial state
        cfg (SolverConfig): shared solver parameters

    Returns:
        CouplingSeries: records and envelope report
    """
    init1.grid.check_same(init2.grid)
    if cfg.t_end < cfg.dt and cfg.t_end != 0:
        raise ParameterError('t_end must be 0 or at least dt')
    stepper = ExponentialStepper(init1.grid, cfg)
    hat1, hat2 = init1.to_spectral(), init2.to_spectral()
    records = [_record(0.0, hat1, hat2, cfg.alpha)]
    max_w1inf = [w1inf_norm(hat1), w1inf_norm(hat2)]
    steps = cfg.step_count
    for index in range(steps):
        hat1 = stepper.advance(hat1, index)
        hat2 = stepper.advance(hat2, index)
        done = index + 1
        if done % cfg.diagnostics_every == 0 or done == steps:
            records.append(_record(done * cfg.dt, hat1, hat2, cfg.alpha))
            max_w1inf = [max(max_w1inf[0], w1inf_norm(hat1)),
                         max(max_w1inf[1], w1inf_norm(hat2))]
    report = envelope_report(records, cfg.dt, cfg.alpha, max_w1inf, cfg.params.r_cut)
    logger.info('coupled run: rate=%r r2=%r', report.rate, report.r_squared)
    return CouplingSeries(records, report)


def perturb_velocity_mode(state, mode, amplitude):
    """Return state with a divergence-free single-mode perturbation added to u.

    Args:
        state (State): base state
        mode (tuple): integer mode (m1, m2), nonzero
        amplitude (float): perturbation size

    Returns:
        State: perturbed state
    """
    m1, m2 = mode
    bump = build_preset('single-mode', state.grid, m1=m1, m2=m2, amplitude=amplitude)
    components = tuple(type(a)(a.grid, a.samples + b.samples)
                       for a, b in zip(state.u.components, bump.u.components))
    return State(state.n, state.c, VectorField(components, divergence_free=True))
