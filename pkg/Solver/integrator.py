"""Exponential integrating-factor time stepping with Euler-Maruyama noise.

Per step, with E = exp(-mu dt), N the nonlinear and forcing tendency and G dW the noise:

    euler: U+ = E (U + dt N(U) + G(U) dW)
    heun:  U* = euler update,
           U+ = E (U + dt/2 N(U) + G(U) dW) + dt/2 N(U*)

The linear diffusion is exact in both schemes; the noise coefficient is always taken at the
left point (Ito). u is re-projected after every step.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from Diagnostics import EventSetProbe, compute_record, energy_budget_residual
from Model import (RegularizationParams, SpectralState, check_alpha, linear_symbols,
                   nonlinear_tendency)
from Noise import NoiseModel, sample_increments, apply_noise
from Spectral import helmholtz_project
from Utils.errors import DivergenceError, ParameterError, PreconditionError

logger = logging.getLogger(__name__)

SCHEMES = ('euler', 'heun')
# relative tolerance when t_end is not an integer multiple of dt
STEP_COUNT_RTOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    Attributes:
        dt (float): step size
        t_end (float): final time, >= 0
        alpha (float): fluid dissipation exponent in [1/2, 1]
        params (RegularizationParams): active approximation layers
        noise (NoiseModel): multiplicative noise on the momentum
        snapshot_every (int): steps between snapshots, 0 for none
        diagnostics_every (int): steps between diagnostics records
        scheme (str): 'euler' or 'heun'
        potential (Potential or None): gravitational potential, None for phi = 0
        delta_floor (float or None): quartic_c regularization, default 1e-10 max c0
        cfl_budget (float): advective Courant number above which a warning is logged
        event_thresholds (tuple): thresholds N of the event-set probe fed by run; the first
            one is the primary threshold, empty means N = inf
    """

    dt: float
    t_end: float
    alpha: float = 1.0
    params: RegularizationParams = field(default_factory=RegularizationParams)
    noise: NoiseModel = field(default_factory=NoiseModel)
    snapshot_every: int = 0
    diagnostics_every: int = 1
    scheme: str = 'heun'
    potential: object = None
    delta_floor: float = None
    cfl_budget: float = 1.0
    event_thresholds: tuple = ()

    def __post_init__(self):
        """Validate the parameters."""
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ParameterError('dt must be positive and finite, got {!r}'.format(self.dt))
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ParameterError('t_end must be finite and nonnegative')
        check_alpha(self.alpha)
        if self.scheme not in SCHEMES:
            raise ParameterError('unknown scheme {!r}; choose from {}'.format(
                self.scheme, SCHEMES))
        if self.snapshot_every < 0:
            raise ParameterError('snapshot_every must be nonnegative')
        if self.diagnostics_every < 1:
            raise ParameterError('diagnostics_every must be at least 1')
        if not all(value > 0 for value in self.event_thresholds):
            raise ParameterError('event thresholds must be positive')

    @property
    def step_count(self):
        """Number of steps needed to reach t_end."""
        ratio = self.t_end / self.dt
        count = int(round(ratio))
        if abs(ratio - count) > STEP_COUNT_RTOL * max(1.0, ratio):
            count = int(math.ceil(ratio))
            logger.warning('t_end=%r is not a multiple of dt=%r; running %d steps to t=%r',
                           self.t_end, self.dt, count, count * self.dt)
        return count

    def check_cfl(self, state):
        """Log a warning if dt * max|u| / spacing exceeds the CFL budget.

        Returns:
            float: the advective Courant number
        """
        u1, u2 = (c.samples for c in state.u.components)
        courant = self.dt * float(np.max(np.hypot(u1, u2))) / state.grid.spacing
        if courant > self.cfl_budget:
            logger.warning('Courant number %.3g exceeds the budget %.3g', courant,
                           self.cfl_budget)
        return courant


@dataclass
class Trajectory:
    """Diagnostics and snapshots of one run, aligned to strictly increasing times."""

    times: list = field(default_factory=list)
    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final_state: object = None
    max_divergence_residual: float = 0.0
    event_set: EventSetProbe = None
    event_flags: list = field(default_factory=list)

    def add_record(self, record):
        """Append a record and fold it into the event-set probe; times must increase strictly."""
        if self.times and record.t <= self.times[-1]:
            raise ParameterError('trajectory times must increase strictly')
        self.times.append(record.t)
        self.records.append(record)
        if self.event_set is not None:
            self.event_flags.append(self.event_set.update(record))


def divergence_residual(u_hat):
    """Return max |xi . u_hat| relative to max |u_hat| (0 for u = 0)."""
    k1, k2 = u_hat.grid.derivative_wavenumbers
    a, b = u_hat[0].coefficients, u_hat[1].coefficients
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    if scale == 0:
        return 0.0
    k_max = float(np.max(np.hypot(k1, k2)))
    return float(np.max(np.abs(k1 * a + k2 * b))) / (scale * k_max)


class ExponentialStepper:
    """Advance spectral states with precomputed integrating factors."""

    def __init__(self, grid, cfg):
        """Initialize the stepper.

        Args:
            grid (SpectralGrid): grid of the states
            cfg (SolverConfig): solver parameters
        """
        if cfg.potential is not None:
            grid.check_same(cfg.potential.grid)
        self.grid = grid
        self.cfg = cfg
        mu_n, mu_c, mu_u = linear_symbols(grid, cfg.alpha, cfg.params)
        self.factors = [np.exp(-mu * cfg.dt) for mu in (mu_n, mu_c, mu_u, mu_u)]
        self.last_noise_sum = 0.0

    def _noise_arrays(self, hat, step_index):
        model = self.cfg.noise
        if model.is_deterministic:
            self.last_noise_sum = 0.0
            return None
        dW = sample_increments(model, step_index, self.cfg.dt)
        self.last_noise_sum = dW.weighted_sum(model)
        noise = apply_noise(hat.u, model, dW)
        zero = np.zeros_like(hat.n.coefficients)
        return [zero, zero, noise[0].coefficients, noise[1].coefficients]

    def advance(self, hat, step_index):
        """Return the state after one step.

        Args:
            hat (SpectralState): state at t = step_index * dt
            step_index (int): index of this step (keys the Wiener increment)

        Returns:
            SpectralState: next state with re-projected u
        """
        cfg = self.cfg
        dt = cfg.dt
        base = hat.arrays()
        drift = nonlinear_tendency(hat, cfg.params, cfg.potential).arrays()
        noise = self._noise_arrays(hat, step_index)
        if noise is None:
            noise = [0.0] * 4
        if cfg.scheme == 'euler':
            new = [E * (a + dt * N + g) for E, a, N, g in zip(self.factors, base, drift, noise)]
        else:
            predicted = [E * (a + dt * N + g)
                         for E, a, N, g in zip(self.factors, base, drift, noise)]
            predicted_hat = SpectralState.from_arrays(self.grid, predicted)
            corrector = nonlinear_tendency(predicted_hat, cfg.params, cfg.potential).arrays()
            new = [E * (a + 0.5 * dt * N + g) + 0.5 * dt * M
                   for E, a, N, g, M in zip(self.factors, base, drift, noise, corrector)]
        out = SpectralState.from_arrays(self.grid, new)
        out = SpectralState(out.n, out.c, helmholtz_project(out.u))
        if not out.is_finite():
            raise DivergenceError(step_index, step_index * dt)
        return out


def step(state, cfg, step_index):
    """Advance a physical state by one step.

    Args:
        state (State): state at t = step_index * dt
        cfg (SolverConfig): solver parameters
        step_index (int): index of the step

    Returns:
        State: next state
    """
    stepper = ExponentialStepper(state.grid, cfg)
    return stepper.advance(state.to_spectral(), step_index).to_physical()


def _check_initial(initial):
    if not initial.is_finite():
        raise PreconditionError('initial state has non-finite samples')
    tol = initial.positivity_tolerance()
    if initial.n.samples.min() < -tol or initial.c.samples.min() < -tol:
        raise PreconditionError('initial n and c must be nonnegative')


def _delta_floor(initial, cfg):
    if cfg.delta_floor is not None:
        return cfg.delta_floor
    return 1e-10 * max(float(initial.c.samples.max()), np.finfo(float).tiny)


def run(initial, cfg):
    """Advance initial to cfg.t_end, recording diagnostics and snapshots on schedule.

    The initial record is always present; the final step is always recorded.

    Args:
        initial (State): nonnegative initial data
        cfg (SolverConfig): solver parameters

    Returns:
        Trajectory: records, snapshots and the final state
    """
    _check_initial(initial)
    cfg.check_cfl(initial)
    grid = initial.grid
    dt = cfg.dt
    steps = cfg.step_count
    lam = math.sqrt(cfg.noise.weight_norm_sq)
    delta_floor = _delta_floor(initial, cfg)
    stepper = ExponentialStepper(grid, cfg)
    thresholds = cfg.event_thresholds or (math.inf,)
    trajectory = Trajectory(event_set=EventSetProbe(thresholds[0], thresholds[1:]))
    trajectory.add_record(compute_record(initial, 0.0, cfg.alpha, delta_floor))
    if cfg.snapshot_every:
        trajectory.snapshots.append((0.0, initial))
    logger.info('running %d steps of dt=%r (%s, %s system)', steps, dt, cfg.scheme,
                cfg.params.layer)

    hat = initial.to_spectral()
    for index in range(steps):
        new_hat = stepper.advance(hat, index)
        trajectory.max_divergence_residual = max(trajectory.max_divergence_residual,
                                                 divergence_residual(new_hat.u))
        done = index + 1
        t = done * dt
        last = done == steps
        if done % cfg.diagnostics_every == 0 or last:
            prev_state = hat.to_physical()
            state = new_hat.to_physical()
            residual = energy_budget_residual(prev_state, state, dt, cfg.alpha, cfg.potential,
                                              lam, cfg.params, stepper.last_noise_sum)
            trajectory.add_record(compute_record(state, t, cfg.alpha, delta_floor, residual))
            logger.debug('t=%r mass_n=%r', t, trajectory.records[-1].mass_n)
        if cfg.snapshot_every and (done % cfg.snapshot_every == 0 or last):
            trajectory.snapshots.append((t, new_hat.to_physical()))
        hat = new_hat

    trajectory.final_state = hat.to_physical()
    return trajectory


def advance_to_end(initial, cfg):
    """Return the final state only, skipping diagnostics."""
    stepper = ExponentialStepper(initial.grid, cfg)
    hat = initial.to_spectral()
    for index in range(cfg.step_count):
        hat = stepper.advance(hat, index)
    return hat.to_physical()
