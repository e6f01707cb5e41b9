"""Refinement studies over dt, eps, k_band or grid resolution on a shared noise path."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import logging
import math

import numpy as np

import Utils
from Analysis import sobolev_norm
from Model import regularize_initial
from Spectral import SpectralField, SpectralGrid, restrict
from Utils.errors import ParameterError
from .integrator import advance_to_end

logger = logging.getLogger(__name__)

AXES = ('dt', 'eps', 'k_band', 'resolution')
MIN_LEVELS = 3


@dataclass(frozen=True)
class RefinementTable:
    """Pairwise differences between consecutive levels and the fitted order.

    Attributes:
        axis (str): refined parameter
        levels (tuple): parameter values, coarse to fine
        differences (tuple): ||X_i - X_{i+1}|| at t_end for consecutive levels
        order (float): slope of log(differences) against log(level spacing)
        r_squared (float): quality of the fit
    """

    axis: str
    levels: tuple
    differences: tuple
    order: float
    r_squared: float

    def is_monotone_decreasing(self):
        """Return True if each difference is smaller than the previous one."""
        return all(b < a for a, b in zip(self.differences, self.differences[1:]))

    def rows(self):
        """Return (level, next_level, difference) rows for CSV output."""
        return [(a, b, d) for a, b, d in zip(self.levels, self.levels[1:], self.differences)]


def _state_distance(a, b, s):
    """Return sqrt(sum of squared H^s norms of the component differences)."""
    total = 0.0
    for fa, fb in zip(_components(a), _components(b)):
        diff = SpectralField(fa.grid, fa.coefficients - fb.coefficients)
        total += sobolev_norm(diff, s) ** 2
    return math.sqrt(total)


def _components(hat):
    return (hat.n, hat.c, hat.u[0], hat.u[1])


def _restrict_state(hat, grid):
    return type(hat)(restrict(hat.n, grid), restrict(hat.c, grid), restrict(hat.u, grid))


def _level_config(cfg, axis, value, finest_dt):
    if axis == 'dt':
        ratio = value / finest_dt
        refinement = int(round(ratio))
        if abs(ratio - refinement) > 1e-9 * ratio:
            raise ParameterError('dt levels must be integer multiples of the finest dt')
        noise = replace(cfg.noise, refinement=cfg.noise.refinement * refinement)
        return replace(cfg, dt=value, noise=noise)
    if axis in ('eps', 'k_band'):
        return replace(cfg, params=cfg.params.with_value(axis, value))
    return cfg


def _level_initial(initial, axis, value):
    if axis != 'resolution':
        return initial
    coarse = SpectralGrid(int(value), initial.grid.L, initial.grid.dealias_fraction)
    return _restrict_state(initial.to_spectral(), coarse).to_physical()


def _level_spacing(axis, value):
    if axis in ('resolution', 'k_band'):
        return 1.0 / value
    return value


def refine_study(initial, cfg, axis, levels, s=0.0, max_workers=None):
    """Run one trajectory per level on a shared noise path and compare the final states.

    Levels are ordered coarse to fine. On the dt axis every level must be an integer
    multiple of the finest dt; the noise refinement is raised accordingly so all levels
    sample one Brownian path. On the resolution axis the initial state (given on the
    finest grid) is restricted to each level, and pairs are compared on the coarser grid.
    For eps and k_band the initial data is regularized per level.

    Args:
        initial (State): initial state
        cfg (SolverConfig): base solver parameters
        axis (str): one of AXES
        levels (list): parameter values, at least three
        s (float): Sobolev index of the comparison norm (0 for L^2)
        max_workers (int, optional): levels run concurrently on a thread pool

    Returns:
        RefinementTable: differences and fitted order
    """
    if axis not in AXES:
        raise ParameterError('unknown refinement axis {!r}; choose from {}'.format(axis, AXES))
    levels = list(levels)
    if len(levels) < MIN_LEVELS:
        raise ParameterError('a refinement study needs at least {} levels'.format(MIN_LEVELS))
    if axis == 'resolution':
        levels = [int(v) for v in levels]
        if any(v > initial.grid.N for v in levels):
            raise ParameterError('resolution levels cannot exceed the initial grid')
        # resolution runs from coarse to fine by increasing N
        levels.sort()
    finest_dt = min(levels) if axis == 'dt' else cfg.dt

    def run_level(value):
        level_cfg = _level_config(cfg, axis, value, finest_dt)
        start = _level_initial(initial, axis, value)
        if axis in ('eps', 'k_band'):
            start = regularize_initial(start, level_cfg.params)
        logger.info('refinement level %s=%r', axis, value)
        return advance_to_end(start, level_cfg).to_spectral()

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        finals = list(pool.map(run_level, levels))

    differences = []
    for coarse, fine in zip(finals, finals[1:]):
        if axis == 'resolution':
            fine = _restrict_state(fine, coarse.grid)
        differences.append(_state_distance(coarse, fine, s))

    spacing = [_level_spacing(axis, v) for v in levels[:-1]]
    positive = [d > 0 for d in differences]
    if all(positive) and len(set(spacing)) > 1:
        order, r_squared = Utils.fit_power_law(spacing, differences)
    else:
        order, r_squared = math.nan, math.nan
    return RefinementTable(axis, tuple(levels), tuple(differences), order, r_squared)


def mean_table(tables):
    """Combine tables of several noise seeds into one by root-mean-square differences.

    Args:
        tables (list): RefinementTable of identical axis and levels

    Returns:
        RefinementTable: table of RMS differences with a refitted order
    """
    first = tables[0]
    stacked = np.array([t.differences for t in tables])
    rms = np.sqrt(np.mean(stacked ** 2, axis=0))
    spacing = [_level_spacing(first.axis, v) for v in first.levels[:-1]]
    order, r_squared = Utils.fit_power_law(spacing, rms)
    return RefinementTable(first.axis, first.levels, tuple(float(d) for d in rms),
                           order, r_squared)
