"""
Tests for the state containers, the cutoff, the right-hand side and the presets.
"""
import math

import numpy as np
import pytest

import Utils
from Model import (PRESETS, Potential, RegularizationParams, SpectralState, State,
                   build_preset, check_alpha, forcing_F, forcing_hs_ratio, linear_symbols,
                   regularize_initial, rhs, theta_cutoff, transport, transport_hs_ratio,
                   truncate_state, vorticity_rhs, w1inf_norm)
from Spectral import (Field, SpectralField, SpectralGrid, VectorField, differentiate, l2_norm,
                      to_physical, to_spectral)
from Utils.errors import GridMismatchError, ParameterError


def _max_diff(a, b):
    return float(np.max(np.abs(a.samples - b.samples)))


class TestThetaCutoff:
    """Test suite for theta_R."""

    def test_plateaus(self):
        """theta = 1 on [0, R] and 0 from 2R on."""
        R = 3.0
        assert theta_cutoff(0.0, R) == 1.0
        assert theta_cutoff(R, R) == 1.0
        assert theta_cutoff(2 * R, R) == 0.0
        assert theta_cutoff(10 * R, R) == 0.0

    def test_midpoint_and_monotone(self):
        """theta(1.5 R) = 1/2 and theta is nonincreasing."""
        R = 2.0
        assert theta_cutoff(1.5 * R, R) == pytest.approx(0.5, abs=1e-15)
        values = [theta_cutoff(x, R) for x in np.linspace(0, 5 * R, 101)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_off(self):
        """R = None or inf switches the cutoff off."""
        assert theta_cutoff(1e9, None) == 1.0
        assert theta_cutoff(1e9, math.inf) == 1.0

    def test_errors(self):
        """R <= 0 and x < 0 are parameter errors."""
        with pytest.raises(ParameterError):
            theta_cutoff(1.0, 0.0)
        with pytest.raises(ParameterError):
            theta_cutoff(-1.0, 1.0)


class TestContainers:
    """Test suite for State, RegularizationParams and Potential."""

    def test_state_rejects_spectral_velocity(self, grid32):
        """State holds physical fields only."""
        with pytest.raises(GridMismatchError):
            State(Field.zeros(grid32), Field.zeros(grid32), VectorField.zeros(grid32, True))

    def test_state_grid_mismatch(self, grid32, grid64):
        """All components must share a grid."""
        with pytest.raises(GridMismatchError):
            State(Field.zeros(grid32), Field.zeros(grid64), VectorField.zeros(grid32))

    def test_spectral_round_trip(self, grid32, random_state):
        """State -> SpectralState -> State is the identity."""
        state = random_state(grid32)
        back = state.to_spectral().to_physical()
        assert _max_diff(back.n, state.n) < 1e-13
        assert _max_diff(back.u[1], state.u[1]) < 1e-13

    def test_positivity_tolerance(self, grid32):
        """tol_pos = 1e-8 max(1, max n, max c)."""
        state = build_preset('uniform', grid32, n_level=5.0, c_level=2.0)
        assert state.positivity_tolerance() == pytest.approx(5e-8)

    def test_layers(self):
        """Active layers select the system."""
        assert RegularizationParams().layer == 'limit'
        assert RegularizationParams(eps=0.1).layer == 'mollified'
        assert RegularizationParams(eps=0.1, k_band=2.0, r_cut=5.0).layer == 'truncated'
        assert RegularizationParams(eps=0.1).with_value('eps', 0.2).eps == 0.2

    def test_layer_validation(self):
        """Active values must be positive."""
        with pytest.raises(ParameterError):
            RegularizationParams(eps=-0.1)
        with pytest.raises(ParameterError):
            RegularizationParams(k_band=0.0)

    def test_alpha_range(self):
        """alpha must lie in [1/2, 1]."""
        check_alpha(0.5)
        check_alpha(1.0)
        with pytest.raises(ParameterError):
            check_alpha(0.4)

    def test_sinusoidal_potential(self, grid32):
        """max |grad phi| = g for the default potential."""
        potential = Potential.sinusoidal(grid32, 2.0)
        grad = potential.grad_phi
        assert np.max(np.hypot(grad[0].samples, grad[1].samples)) == pytest.approx(2.0)
        spectral = to_physical(differentiate(to_spectral(potential.phi), 'grad'))
        assert _max_diff(spectral[1], grad[1]) < 1e-12
        assert not potential.is_zero()
        assert Potential.zero(grid32).is_zero()

    def test_w1inf_norm(self, grid32):
        """sin(x1) in one component gives max |f| + max |grad f| = 2."""
        x1, _ = grid32.coordinates
        state = State(Field(grid32, np.sin(x1)), Field.zeros(grid32), VectorField.zeros(grid32))
        assert w1inf_norm(state.to_spectral()) == pytest.approx(2.0, rel=1e-6)


class TestTransport:
    """Test suite for u . grad f."""

    def test_zero_velocity(self, grid32, random_field):
        """u = 0 gives zero."""
        out = transport(VectorField.zeros(grid32), random_field(grid32))
        assert not np.any(out.samples)

    def test_constant_scalar(self, grid32, random_velocity):
        """Constants are not transported."""
        out = transport(random_velocity(grid32), Field.constant(grid32, 3.0))
        assert np.max(np.abs(out.samples)) == 0

    def test_skew_symmetry(self, grid32, random_velocity, random_field):
        """(u . grad f, f) vanishes for divergence-free u."""
        u = random_velocity(grid32, 5)
        f = random_field(grid32, 5)
        adv = transport(u, f)
        pairing = grid32.cell_area * np.sum(adv.samples * f.samples)
        scale = grid32.cell_area * np.sqrt(np.sum(adv.samples ** 2) * np.sum(f.samples ** 2))
        assert abs(pairing) <= 1e-10 * scale

    def test_single_mode_advection(self, grid32):
        """u = (1, 0) advects sin(x1) into cos(x1)."""
        x1, _ = grid32.coordinates
        u = VectorField((Field.constant(grid32, 1.0), Field.zeros(grid32)))
        out = transport(u, Field(grid32, np.sin(x1)))
        assert np.allclose(out.samples, np.cos(x1), atol=1e-13)


class TestForcing:
    """Test suite for the chemotaxis, consumption and buoyancy block."""

    def test_zero_density(self, grid32, random_velocity):
        """n = 0 gives zero forcing."""
        x1, _ = grid32.coordinates
        state = State(Field.zeros(grid32), Field(grid32, 1 + 0.5 * np.sin(x1)),
                      random_velocity(grid32))
        dn, dc, du = forcing_F(state, RegularizationParams(), Potential.sinusoidal(grid32, 1))
        assert np.max(np.abs(dn.samples)) < 1e-15
        assert np.max(np.abs(dc.samples)) < 1e-15
        assert np.max(np.abs(du[0].samples)) < 1e-15

    def test_uniform_state(self, grid32):
        """Uniform n = a, c = b: dn = a - a^2, dc = -a b, P(a grad phi) = 0."""
        a, b = 0.3, 2.0
        state = build_preset('uniform', grid32, n_level=a, c_level=b)
        dn, dc, du = forcing_F(state, RegularizationParams(), Potential.sinusoidal(grid32, 1))
        assert np.allclose(dn.samples, a - a * a, atol=1e-15)
        assert np.allclose(dc.samples, -a * b, atol=1e-15)
        assert np.max(np.abs(du[1].samples)) < 1e-14

    def test_buoyancy_rotational(self, grid32):
        """A density varying along x1 under gravity along x2 drives a rotational flow."""
        x1, _ = grid32.coordinates
        state = State(Field(grid32, 1 + 0.5 * np.cos(x1)), Field.constant(grid32, 1.0),
                      VectorField.zeros(grid32))
        _, _, du = forcing_F(state, RegularizationParams(), Potential.sinusoidal(grid32, 1))
        assert l2_norm(to_spectral(du)) > 0.1
        assert np.max(np.abs(differentiate(to_spectral(du), 'div').coefficients)) < 1e-13

    def test_buoyancy_mean_removed(self, grid32):
        """n = 1 + cos(x2) / 2 makes n grad phi a gradient plus the constant (0, 1/4).

        The projection keeps only that constant and the mean-free velocity drops it too.
        """
        _, x2 = grid32.coordinates
        state = State(Field(grid32, 1 + 0.5 * np.cos(x2)), Field.constant(grid32, 1.0),
                      VectorField.zeros(grid32))
        _, _, du = forcing_F(state, RegularizationParams(), Potential.sinusoidal(grid32, 1))
        assert np.max(np.abs(du[0].samples)) < 1e-14
        assert np.max(np.abs(du[1].samples)) < 1e-14

    def test_mass_identity(self, grid32, random_state):
        """The integral of dn equals the integral of n - n^2."""
        state = random_state(grid32, 6)
        dn, _, _ = forcing_F(state, RegularizationParams(), None)
        n = state.n.samples
        lhs = grid32.cell_area * np.sum(dn.samples)
        rhs_value = grid32.cell_area * np.sum(n - n ** 2)
        assert lhs == pytest.approx(rhs_value, rel=1e-10, abs=1e-12)

    def test_mollifier_second_order(self, grid32, random_state):
        """Mollified tendencies approach the limit ones at rate eps^2."""
        state = random_state(grid32, 3)
        potential = Potential.sinusoidal(grid32, 1.0)
        limit = rhs(state, RegularizationParams(), potential, 0.75)
        eps_values = [0.1, 0.05, 0.025]
        diffs = []
        for eps in eps_values:
            out = rhs(state, RegularizationParams(eps=eps), potential, 0.75)
            total = sum(_max_diff(a, b) ** 2 for a, b in
                        zip((out[0], out[1], out[2][0], out[2][1]),
                            (limit[0], limit[1], limit[2][0], limit[2][1])))
            diffs.append(math.sqrt(total))
        order, r_squared = Utils.fit_power_law(eps_values, diffs)
        assert 1.8 <= order <= 2.2
        assert r_squared > 0.99

    def test_hs_ratios_bounded(self, grid32, random_state):
        """Measured constants of the transport and forcing bounds stay moderate."""
        for _ in range(5):
            state = random_state(grid32, 5)
            assert 0 <= transport_hs_ratio(state, 1.0) < 10
            value = forcing_hs_ratio(state, RegularizationParams(), None, 1.0)
            assert math.isfinite(value) and value > 0

    def test_transport_ratio_vanishes_at_l2(self, grid32, random_state):
        """s = 0 pairing of the transport block is zero by skew symmetry."""
        assert transport_hs_ratio(random_state(grid32, 5), 0.0) < 1e-12


class TestRhs:
    """Test suite for the assembled tendency and the vorticity form."""

    def test_zero_state(self, grid32):
        """All layers off, zero state: zero tendency."""
        dn, dc, du = rhs(State.zeros(grid32), RegularizationParams(), None, 1.0)
        assert not np.any(dn.samples) and not np.any(dc.samples)
        assert not np.any(du[0].samples) and not np.any(du[1].samples)

    def test_cutoff_kills_nonlinearity(self, grid32, random_state):
        """R far below the state norm leaves only the dissipation."""
        state = random_state(grid32, 5)
        params = RegularizationParams(r_cut=1e-3)
        dn, dc, du = rhs(state, params, Potential.sinusoidal(grid32, 1.0), 0.75)
        hat = state.to_spectral()
        mu_n, _, mu_u = linear_symbols(grid32, 0.75, params)
        expected_n = to_physical(SpectralField(grid32, -mu_n * hat.n.coefficients))
        expected_u = to_physical(SpectralField(grid32, -mu_u * hat.u[0].coefficients))
        assert _max_diff(dn, expected_n) < 1e-12
        assert _max_diff(du[0], expected_u) < 1e-12

    def test_layers_off_limit(self, grid32, random_state):
        """k beyond the grid and R = inf agree with the limit system on mean-free velocity."""
        state = random_state(grid32, 5)
        potential = Potential.sinusoidal(grid32, 1.0)
        limit = rhs(state, RegularizationParams(), potential, 0.75)
        wide = rhs(state, RegularizationParams(k_band=1e6, r_cut=math.inf), potential, 0.75)
        assert _max_diff(limit[0], wide[0]) < 1e-12
        assert _max_diff(limit[2][1], wide[2][1]) < 1e-12

    def test_truncation(self, grid32, random_state):
        """J_k removes the velocity mean and modes outside the band."""
        state = random_state(grid32, 8)
        params = RegularizationParams(k_band=1.5)
        out = truncate_state(state.to_spectral(), params)
        xi = grid32.xi_norm
        assert not np.any(out.u[0].coefficients[(xi > 1.5) | (xi < 1 / 1.5)])
        assert np.any(out.u[0].coefficients)
        assert out.n.coefficients[0, 0] == pytest.approx(state.to_spectral().n.coefficients[0, 0])
        strict = truncate_state(state.to_spectral(), RegularizationParams(k_band=1.5,
                                                                         strict_annulus=True))
        assert strict.n.coefficients[0, 0] == 0

    def test_vorticity_single_mode(self, grid32):
        """n = 0, single divergence-free mode: -(2 pi |m| / L)^(2 alpha) v."""
        state = build_preset('single-mode', grid32, m1=1, m2=2)
        v = to_physical(differentiate(to_spectral(state.u), 'curl2d'))
        out = vorticity_rhs(state, None, RegularizationParams(), 0.75)
        nu = math.hypot(1, 2) ** 1.5
        assert np.allclose(out.samples, -nu * v.samples, atol=1e-12)

    def test_vorticity_zero_state(self, grid32):
        """The zero state has zero vorticity tendency."""
        out = vorticity_rhs(State.zeros(grid32), None, RegularizationParams(), 1.0)
        assert not np.any(out.samples)

    def test_vorticity_consistency(self, grid32, random_state):
        """curl2d of the velocity tendency equals the vorticity tendency."""
        state = random_state(grid32, 5)
        potential = Potential.sinusoidal(grid32, 1.0)
        for params in (RegularizationParams(), RegularizationParams(eps=0.1, k_band=2.0)):
            _, _, du = rhs(state, params, potential, 0.75)
            curl = to_physical(differentiate(to_spectral(du), 'curl2d'))
            direct = vorticity_rhs(state, potential, params, 0.75)
            assert _max_diff(curl, direct) <= 1e-8 * np.max(np.abs(direct.samples))


class TestInitialData:
    """Test suite for presets and regularized initial data."""

    def test_registry(self):
        """Every preset name builds through build_preset."""
        grid = SpectralGrid(16, 2 * np.pi)
        for name in PRESETS:
            state = build_preset(name, grid)
            assert state.is_finite()

    def test_blob(self, grid32):
        """Blob: positive density peaked at the center, uniform c, divergence-free flow."""
        state = build_preset('blob', grid32)
        assert state.n.samples[16, 16] == pytest.approx(1.0, abs=1e-2)
        assert np.allclose(state.c.samples, 1.0)
        div = differentiate(to_spectral(state.u), 'div')
        assert np.max(np.abs(div.coefficients)) < 1e-14
        assert np.max(np.abs(state.u[0].samples)) == pytest.approx(0.1, rel=1e-6)

    def test_single_mode_divergence_free(self, grid32):
        """Any integer mode gives a divergence-free velocity of the requested amplitude."""
        state = build_preset('single-mode', grid32, m1=3, m2=-2, amplitude=2.0)
        div = differentiate(to_spectral(state.u), 'div')
        assert np.max(np.abs(div.coefficients)) < 1e-13
        speed = np.hypot(state.u[0].samples, state.u[1].samples)
        assert np.max(speed) == pytest.approx(2.0, rel=1e-3)

    def test_preset_errors(self, grid32):
        """Unknown names, unknown options and the zero mode are rejected."""
        with pytest.raises(ParameterError):
            build_preset('vortex', grid32)
        with pytest.raises(ParameterError):
            build_preset('blob', grid32, sigma=1.0)
        with pytest.raises(ParameterError):
            build_preset('single-mode', grid32, m1=0, m2=0)

    def test_regularize_limit_is_identity(self, grid32, random_state):
        """All layers off leaves the initial data unchanged."""
        state = random_state(grid32)
        out = regularize_initial(state, RegularizationParams())
        assert _max_diff(out.n, state.n) < 1e-13
        assert _max_diff(out.u[0], state.u[0]) < 1e-13

    def test_regularize_mollifies_and_truncates(self, grid32, random_state):
        """eps and k_band smooth the data; the velocity stays divergence free."""
        state = random_state(grid32, 8)
        out = regularize_initial(state, RegularizationParams(eps=0.2, k_band=2.0))
        hat = out.to_spectral()
        assert l2_norm(hat.u) < l2_norm(to_spectral(state.u))
        assert hat.n.coefficients[0, 0] == pytest.approx(
            to_spectral(state.n).coefficients[0, 0])
        div = differentiate(hat.u, 'div')
        assert np.max(np.abs(div.coefficients)) < 1e-14
        assert isinstance(hat, SpectralState)
