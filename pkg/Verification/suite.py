"""Invariant suite behind `chemoflow verify`.

Each check runs on a small grid and returns (passed, detail); the invariant decorator
registers it. A check that raises counts as a failure. All randomness is seeded.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

import config
import Utils
from Analysis import DyadicRange, dyadic_block, embedding_ratio, verify_bilinear_estimate
from Coupling import coupled_run
from Diagnostics import chain_rule_identity_check, energy_budget_residual
from Model import (Potential, RegularizationParams, State, build_preset, forcing_F, rhs,
                   theta_cutoff, transport, vorticity_rhs)
from Noise import NoiseModel, apply_noise, sample_increments
from Persistence import SnapshotCodec
from Solver import SolverConfig, advance_to_end, mean_table, refine_study, run, step
from Spectral import (Field, SpectralField, SpectralGrid, VectorField, biot_savart,
                      differentiate, fractional_laplacian, friedrichs_truncate,
                      helmholtz_project, l2_inner, l2_norm, multiply, parseval_defect,
                      to_physical, to_spectral)

logger = logging.getLogger(__name__)

CHECKS = []
SEED = 20230214


def invariant(name):
    """Register a check function under name."""
    def register(func):
        CHECKS.append((name, func))
        return func
    return register


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one invariant check."""

    name: str
    passed: bool
    detail: str

    def line(self):
        """Return the PASS/FAIL line printed by the CLI."""
        return '{} {} {}'.format('PASS' if self.passed else 'FAIL', self.name, self.detail)


def _grid(n_points=32):
    return SpectralGrid(n_points, 2 * np.pi)


def _rng(offset=0):
    return np.random.default_rng(SEED + offset)


def _random_velocity(grid, rng, m_max):
    raw = VectorField((Field.random_band(grid, rng, m_max), Field.random_band(grid, rng, m_max)))
    return to_physical(helmholtz_project(to_spectral(raw)))


def _bump(grid, rng, m_max):
    f = Field.random_band(grid, rng, m_max).samples
    return Field(grid, 1.0 + 0.2 * f / np.max(np.abs(f)))


def _random_state(grid, rng, m_max):
    n = _bump(grid, rng, m_max)
    c = _bump(grid, rng, m_max)
    return State(n, c, _random_velocity(grid, rng, m_max))


def _white_noise(grid, rng):
    return Field(grid, rng.standard_normal((grid.N, grid.N)))


def _relative(diff, scale):
    return diff / scale if scale > 0 else diff


@invariant('spectral.round_trip')
def check_round_trip():
    f = _white_noise(_grid(), _rng())
    F = to_spectral(f)
    back = to_physical(F)
    err = _relative(np.max(np.abs(back.samples - f.samples)), np.max(np.abs(f.samples)))
    defect = _relative(F.hermitian_defect(), np.max(np.abs(F.coefficients)))
    return err <= 1e-12 and defect <= 1e-14, 'rel_err={:.3g} hermitian={:.3g}'.format(
        err, defect)


@invariant('spectral.parseval')
def check_parseval():
    defect = parseval_defect(Field.random_band(_grid(), _rng(1), 12))
    return defect <= 1e-10, 'defect={:.3g}'.format(defect)


@invariant('spectral.projection')
def check_projection():
    grid = _grid()
    rng = _rng(2)
    raw = [to_spectral(VectorField((Field.random_band(grid, rng, 10),
                                    Field.random_band(grid, rng, 10)))) for _ in range(2)]
    once = helmholtz_project(raw[0])
    twice = helmholtz_project(once)
    idem = _relative(l2_norm(VectorField((
        SpectralField(grid, twice[0].coefficients - once[0].coefficients),
        SpectralField(grid, twice[1].coefficients - once[1].coefficients)))), l2_norm(once))
    adj = abs(l2_inner(once, raw[1]) - l2_inner(raw[0], helmholtz_project(raw[1])))
    adj = _relative(adj, l2_norm(raw[0]) * l2_norm(raw[1]))
    return idem <= 1e-12 and adj <= 1e-10, 'idempotence={:.3g} adjointness={:.3g}'.format(
        idem, adj)


@invariant('spectral.frac_lap_composition')
def check_frac_lap():
    F = to_spectral(Field.random_band(_grid(), _rng(3), 10))
    half = fractional_laplacian(fractional_laplacian(F, 0.5), 0.5)
    full = fractional_laplacian(F, 1.0)
    err = _relative(np.max(np.abs(half.coefficients - full.coefficients)),
                    np.max(np.abs(full.coefficients)))
    return err <= 1e-10, 'rel_err={:.3g}'.format(err)


@invariant('spectral.bernstein')
def check_bernstein():
    grid = _grid()
    k = 1.0
    F = friedrichs_truncate(to_spectral(Field.random_band(grid, _rng(4), 12)), k, annulus=False)
    ratio = l2_norm(differentiate(F, 'grad')) / (2 * np.pi * k * l2_norm(F))
    return ratio <= 1 + 1e-12, 'ratio={:.6f}'.format(ratio)


@invariant('spectral.div_grad')
def check_div_grad():
    F = to_spectral(_white_noise(_grid(), _rng(13)))
    lap = differentiate(F, 'laplacian').coefficients
    composed = differentiate(differentiate(F, 'grad'), 'div').coefficients
    err = _relative(np.max(np.abs(composed - lap)), np.max(np.abs(lap)))
    return err <= 1e-10, 'rel_err={:.3g}'.format(err)


@invariant('spectral.dealiased_product')
def check_dealiased_product():
    grid = _grid(16)
    rng = _rng(14)
    m_max = 5
    size = 2 * m_max + 1
    fc = Utils.random_band_coefficients(rng, m_max)
    gc = Utils.random_band_coefficients(rng, m_max)
    f = to_physical(SpectralField(grid, Utils.embed_band_coefficients(fc, grid.N)))
    g = to_physical(SpectralField(grid, Utils.embed_band_coefficients(gc, grid.N)))
    out = multiply(f, g).coefficients
    direct = np.zeros((2 * size - 1, 2 * size - 1), dtype=complex)
    for a in range(size):
        for b in range(size):
            direct[a:a + size, b:b + size] += fc[a, b] * gc
    idx = np.arange(-m_max, m_max + 1) % grid.N
    err = np.max(np.abs(out[np.ix_(idx, idx)] - direct[m_max:3 * m_max + 1,
                                                       m_max:3 * m_max + 1]))
    leak = np.max(np.abs(out[~grid.dealias_mask]))
    return err <= 1e-12 and leak == 0, 'max_err={:.3g} leak={:.3g}'.format(err, leak)


@invariant('spectral.biot_savart')
def check_biot_savart():
    grid = _grid()
    coeffs = to_spectral(_white_noise(grid, _rng(5))).coefficients.copy()
    coeffs[0, 0] = 0.0
    coeffs[grid.derivative_null_modes] = 0.0
    v = SpectralField(grid, coeffs)
    u = biot_savart(v)
    back = differentiate(u, 'curl2d')
    err = _relative(np.max(np.abs(back.coefficients - v.coefficients)),
                    np.max(np.abs(v.coefficients)))
    div = _relative(np.max(np.abs(differentiate(u, 'div').coefficients)),
                    max(np.max(np.abs(u[0].coefficients)), np.max(np.abs(u[1].coefficients))))
    return err <= 1e-12 and div <= 1e-12, 'rel_err={:.3g} div={:.3g}'.format(err, div)


@invariant('lp.partition_of_unity')
def check_partition():
    grid = _grid(64)
    F = to_spectral(Field.random_band(grid, _rng(6), 20))
    total = np.zeros_like(F.coefficients)
    total[0, 0] = F.coefficients[0, 0]
    for j in DyadicRange.for_grid(grid):
        total = total + dyadic_block(F, j).coefficients
    err = _relative(np.max(np.abs(total - F.coefficients)), np.max(np.abs(F.coefficients)))
    return err <= 1e-10, 'rel_err={:.3g}'.format(err)


@invariant('lp.quasi_orthogonality')
def check_orthogonality():
    grid = _grid(64)
    F = to_spectral(Field.random_band(grid, _rng(7), 20))
    blocks = {j: dyadic_block(F, j) for j in DyadicRange.for_grid(grid)}
    worst = 0.0
    for j, a in blocks.items():
        for jj, b in blocks.items():
            if abs(j - jj) >= 2:
                worst = max(worst, abs(l2_inner(a, b)))
    return worst <= 1e-14 * l2_norm(F) ** 2, 'max_pairing={:.3g}'.format(worst)


def _across_grids(measure):
    """Evaluate measure(grid, rng) on N = 64 and N = 128 with the same draws."""
    return [measure(_grid(n_points), _rng(15)) for n_points in (64, 128)]


@invariant('lp.besov_embedding')
def check_besov_embedding():
    coarse, fine = _across_grids(
        lambda grid, rng: embedding_ratio(Field.random_band(grid, rng, 10), 1.5))
    ok = math.isfinite(coarse) and coarse > 0 and abs(fine - coarse) <= 0.2 * coarse
    return ok, 'ratio64={:.4g} ratio128={:.4g}'.format(coarse, fine)


@invariant('lp.bilinear_stability')
def check_bilinear_stability():
    def worst_ratio(grid, rng):
        worst = 0.0
        for _ in range(40):
            f = VectorField((Field.random_band(grid, rng, 10), Field.random_band(grid, rng, 10)))
            worst = max(worst, verify_bilinear_estimate(f, Field.random_band(grid, rng, 10), 0.75))
        return worst

    coarse, fine = _across_grids(worst_ratio)
    ok = math.isfinite(coarse) and coarse > 0 and abs(fine - coarse) <= 0.2 * coarse
    return ok, 'worst64={:.4g} worst128={:.4g}'.format(coarse, fine)


@invariant('model.theta_cutoff')
def check_theta():
    R = 2.0
    ok = theta_cutoff(0.0, R) == 1.0 and theta_cutoff(2 * R, R) == 0.0
    mid = theta_cutoff(1.5 * R, R)
    return ok and abs(mid - 0.5) <= 1e-14, 'theta(1.5R)={!r}'.format(mid)


@invariant('model.transport_skew_symmetry')
def check_skew():
    grid = _grid()
    rng = _rng(8)
    u = _random_velocity(grid, rng, 10)
    f = Field.random_band(grid, rng, 10)
    adv = transport(u, f)
    pairing = abs(grid.cell_area * np.sum(adv.samples * f.samples))
    scale = grid.cell_area * np.sqrt(np.sum(adv.samples ** 2) * np.sum(f.samples ** 2))
    err = _relative(pairing, scale)
    return err <= 1e-10, 'rel_pairing={:.3g}'.format(err)


@invariant('model.forcing_mass_identity')
def check_forcing_mass():
    grid = _grid()
    state = _random_state(grid, _rng(9), 8)
    dn, _, _ = forcing_F(state, RegularizationParams(), None)
    n = state.n.samples
    lhs = grid.cell_area * np.sum(dn.samples)
    rhs_value = grid.cell_area * np.sum(n - n ** 2)
    err = _relative(abs(lhs - rhs_value), grid.cell_area * np.sum(np.abs(n - n ** 2)))
    return err <= 1e-10, 'rel_err={:.3g}'.format(err)


@invariant('model.vorticity_consistency')
def check_vorticity():
    grid = _grid()
    state = _random_state(grid, _rng(10), 5)
    potential = Potential.sinusoidal(grid, 1.0)
    params = RegularizationParams()
    _, _, du = rhs(state, params, potential, 0.75)
    curl = to_physical(differentiate(to_spectral(du), 'curl2d')).samples
    direct = vorticity_rhs(state, potential, params, 0.75).samples
    err = _relative(np.max(np.abs(curl - direct)), np.max(np.abs(direct)))
    return err <= 1e-8, 'rel_err={:.3g}'.format(err)


@invariant('noise.determinism')
def check_noise_determinism():
    model = NoiseModel(k_modes=4, lam=0.5, seed=7)
    a = sample_increments(model, 11, 1e-2).values
    b = sample_increments(model, 11, 1e-2).values
    c = sample_increments(model, 12, 1e-2).values
    return bool(np.array_equal(a, b) and not np.array_equal(a, c)), 'K=4'


@invariant('noise.divergence_free')
def check_noise_divergence():
    grid = _grid()
    model = NoiseModel(k_modes=3, lam=0.3, seed=1)
    u = to_spectral(_random_velocity(grid, _rng(11), 10))
    out = apply_noise(u, model, sample_increments(model, 0, 0.1))
    div = np.max(np.abs(differentiate(out, 'div').coefficients))
    return div <= 1e-12, 'max_div={:.3g}'.format(div)


@invariant('noise.second_moment')
def check_second_moment():
    state = build_preset('single-mode', _grid(8), m1=1, m2=0)
    lam, t_end = 0.3, 0.5
    start = l2_norm(to_spectral(state.u)) ** 2
    ratios = np.array([
        l2_norm(to_spectral(advance_to_end(state, SolverConfig(
            dt=0.05, t_end=t_end, scheme='euler',
            noise=NoiseModel(k_modes=2, lam=lam, seed=seed))).u)) ** 2 / start
        for seed in range(1000)])
    expected = math.exp((-2.0 + lam ** 2) * t_end)
    stderr = ratios.std(ddof=1) / math.sqrt(len(ratios))
    gap = abs(ratios.mean() - expected)
    return gap <= 3 * stderr, 'mean={:.5f} expected={:.5f} se={:.2g}'.format(
        ratios.mean(), expected, stderr)


@invariant('integrator.logistic_oracle')
def check_logistic():
    state = build_preset('uniform', _grid(8), n_level=0.5, c_level=1.0)
    final = advance_to_end(state, SolverConfig(dt=5e-4, t_end=1.0))
    value = float(final.n.samples.mean())
    expected = math.e / (math.e + 1)
    return abs(value - expected) <= 1e-6, 'n(1)={!r}'.format(value)


@invariant('integrator.consumption_oracle')
def check_consumption():
    state = build_preset('uniform', _grid(8), n_level=1.0, c_level=1.0)
    final = advance_to_end(state, SolverConfig(dt=5e-4, t_end=1.0))
    value = float(final.c.samples.mean())
    return abs(value - math.exp(-1)) <= 1e-6, 'c(1)={!r}'.format(value)


@invariant('integrator.linear_decay_exact')
def check_linear_decay():
    grid = _grid(16)
    state = build_preset('single-mode', grid, m1=2, m2=1)
    cfg = SolverConfig(dt=0.05, t_end=1.0, alpha=0.75)
    final = advance_to_end(state, cfg)
    nu = (2 * np.pi * math.hypot(2, 1) / grid.L) ** 1.5
    expected = l2_norm(to_spectral(state.u)) * math.exp(-nu)
    err = abs(l2_norm(to_spectral(final.u)) - expected) / expected
    return err <= 1e-10, 'rel_err={:.3g}'.format(err)


@invariant('integrator.blob_invariants')
def check_blob_invariants():
    grid = _grid()
    dt = 0.01
    state = build_preset('blob', grid, width_fraction=0.15)
    cfg = SolverConfig(dt=dt, t_end=0.2, noise=NoiseModel(k_modes=4, lam=0.1, seed=1),
                       potential=Potential.sinusoidal(grid, 1.0))
    trajectory = run(state, cfg)
    records = trajectory.records
    tol = state.positivity_tolerance()
    failures = []
    if min(min(r.min_n, r.min_c) for r in records) < -tol:
        failures.append('positivity')
    for prev, nxt in zip(records, records[1:]):
        if nxt.linf_c > prev.linf_c * (1 + 1e-6):
            failures.append('max_c@{:g}'.format(nxt.t))
        if nxt.mass_c > prev.mass_c * (1 + 1e-6):
            failures.append('mass_c@{:g}'.format(nxt.t))
        if nxt.mass_n - prev.mass_n > dt * (prev.mass_n - prev.l2_n ** 2) + 10 * dt ** 2:
            failures.append('mass_n@{:g}'.format(nxt.t))
    if trajectory.max_divergence_residual > 1e-10:
        failures.append('divergence')
    event_set = trajectory.event_set
    if not all(event_set.indicator_path(10 * event_set.largest())):
        failures.append('event_set')
    return not failures, 'max_div={:.3g} failed={}'.format(
        trajectory.max_divergence_residual, ','.join(failures) or 'none')


@invariant('integrator.strong_order')
def check_strong_order():
    state = build_preset('single-mode', _grid(8), m1=1, m2=0)
    tables = []
    for seed in range(32):
        cfg = SolverConfig(dt=0.0125, t_end=0.5, scheme='euler',
                           noise=NoiseModel(k_modes=1, lam=0.5, seed=seed))
        tables.append(refine_study(state, cfg, 'dt', [0.1, 0.05, 0.025, 0.0125]))
    order = mean_table(tables).order
    return 0.4 <= order <= 1.1, 'order={:.3f}'.format(order)


@invariant('integrator.refine_axes')
def check_refine_axes():
    blob = build_preset('blob', _grid(), width_fraction=0.15)
    studies = {
        'dt': refine_study(blob, SolverConfig(dt=0.01, t_end=0.4), 'dt', [0.04, 0.02, 0.01]),
        'eps': refine_study(
            blob, SolverConfig(dt=0.02, t_end=0.2, noise=NoiseModel(k_modes=2, lam=0.1, seed=5),
                               params=RegularizationParams(eps=0.2)),
            'eps', [0.2, 0.1, 0.05]),
        'k_band': refine_study(
            blob, SolverConfig(dt=0.02, t_end=0.1, params=RegularizationParams(k_band=1.0)),
            'k_band', [1.0, 2.0, 4.0]),
        'resolution': refine_study(build_preset('blob', _grid(64), width_fraction=0.1),
                                   SolverConfig(dt=0.02, t_end=0.1), 'resolution', [16, 32, 64]),
    }
    bad = [axis for axis, table in studies.items() if not table.is_monotone_decreasing()]
    order = studies['dt'].order
    return not bad and order >= 1.0, 'dt_order={:.3f} non_monotone={}'.format(
        order, ','.join(bad) or 'none')


@invariant('diagnostics.chain_rule')
def check_chain_rule():
    grid = SpectralGrid(64, 2 * np.pi)
    x1, _ = grid.coordinates
    err = chain_rule_identity_check(Field(grid, 2.0 + np.sin(x1)))
    return err <= 1e-6, 'rel_err={:.3g}'.format(err)


@invariant('diagnostics.energy_residual_linear')
def check_energy_linear():
    grid = _grid(16)
    state = build_preset('single-mode', grid, m1=1, m2=1)
    cfg = SolverConfig(dt=0.1, t_end=0.1, alpha=0.75, scheme='euler')
    nxt = step(state, cfg, 0)
    residual = energy_budget_residual(state, nxt, cfg.dt, cfg.alpha, None, 0.0)
    rel = residual / l2_norm(to_spectral(state.u)) ** 2
    return rel <= 1e-12, 'rel_residual={:.3g}'.format(rel)


@invariant('diagnostics.energy_residual_ratio')
def check_energy_ratio():
    grid = _grid()
    potential = Potential.sinusoidal(grid, 1.0)
    state = build_preset('blob', grid)
    residuals = []
    for dt in (0.002, 0.001):
        cfg = SolverConfig(dt=dt, t_end=dt, alpha=0.75, scheme='euler', potential=potential)
        residuals.append(energy_budget_residual(state, step(state, cfg, 0), dt, 0.75,
                                                potential, 0.0))
    ratio = _relative(residuals[0], residuals[1])
    return abs(ratio - 4.0) <= 1.2, 'ratio={:.3f}'.format(ratio)


@invariant('coupling.identical_inputs')
def check_coupling_identical():
    grid = _grid(16)
    state = build_preset('blob', grid)
    cfg = SolverConfig(dt=0.01, t_end=0.05, alpha=0.75,
                       noise=NoiseModel(k_modes=2, lam=0.1, seed=3),
                       potential=Potential.sinusoidal(grid, 1.0))
    series = coupled_run(state, state, cfg)
    worst = max(r.E for r in series.records)
    return worst <= 1e-12, 'max_E={:.3g}'.format(worst)


@invariant('persistence.snapshot_round_trip')
def check_snapshot():
    codec = SnapshotCodec(config)
    grid = _grid(16)
    state = _random_state(grid, _rng(12), 5)
    blob = codec.create_snapshot(state, 0.25, 0.75)
    again = codec.parse_snapshot(blob)
    return codec.create_snapshot(again.state, again.t, again.alpha) == blob, \
        '{} bytes'.format(len(blob))


def run_suite(names=None):
    """Run the registered checks.

    Args:
        names (iterable, optional): restrict to these check names

    Returns:
        list: CheckResult per check, in registration order
    """
    results = []
    wanted = None if names is None else set(names)
    for name, func in CHECKS:
        if wanted is not None and name not in wanted:
            continue
        try:
            passed, detail = func()
        except Exception as err:  # pylint: disable=broad-except
            logger.exception('check %s raised', name)
            passed, detail = False, 'error: {}'.format(err)
        results.append(CheckResult(name, bool(passed), detail))
    return results
