"""
Tests for the grid containers and the Fourier-space operators.

Validates:
- grid validation and wavenumber tables
- transforms, Parseval and the Hermitian structure of real fields
- fractional Laplacian, projection, truncation, mollifier and dealias multipliers
- differential operators and Biot-Savart inversion
"""
import numpy as np
import pytest

import Utils
from Spectral import (Field, SpectralField, SpectralGrid, VectorField, apply_multiplier,
                      biot_savart, dealias, differentiate, fractional_laplacian,
                      fractional_laplacian_symbol, friedrichs_mask, friedrichs_truncate,
                      helmholtz_project, l2_inner, l2_norm, mollifier_symbol, mollify,
                      multiply, negative_power_symbol, parseval_defect, physical_l2_norm,
                      restrict, to_physical, to_spectral)
from Utils.errors import GridMismatchError, ParameterError, PreconditionError


def _max_abs(F):
    return float(np.max(np.abs(F.coefficients)))


def _sub(A, B):
    if isinstance(A, VectorField):
        return VectorField(tuple(_sub(a, b) for a, b in zip(A.components, B.components)))
    return SpectralField(A.grid, A.coefficients - B.coefficients)


def _white_noise(grid, rng):
    """Independent normal samples; the spectrum fills every mode, Nyquist lines included."""
    return Field(grid, rng.standard_normal((grid.N, grid.N)))


class TestSpectralGrid:
    """Test suite for SpectralGrid."""

    def test_default_side_length(self):
        """Default L is 16 pi, the whole-plane proxy."""
        grid = SpectralGrid(64)
        assert grid.L == pytest.approx(16 * np.pi)
        assert grid.spacing == pytest.approx(grid.L / 64)
        assert grid.area == pytest.approx(grid.L ** 2)

    def test_validation(self):
        """N must be positive and even, L positive, dealias fraction in (0, 1]."""
        with pytest.raises(ParameterError, match='even'):
            SpectralGrid(33)
        with pytest.raises(ParameterError):
            SpectralGrid(0)
        with pytest.raises(ParameterError):
            SpectralGrid(32, -1.0)
        with pytest.raises(ParameterError):
            SpectralGrid(32, 1.0, 0.0)

    def test_mode_index_fft_order(self):
        """Mode indices follow fftfreq order with the Nyquist index negative."""
        grid = SpectralGrid(8, 1.0)
        assert list(grid.mode_index) == [0, 1, 2, 3, -4, -3, -2, -1]

    def test_nyquist_derivative_zeroed(self, grid32):
        """The first-derivative wavenumber vanishes on the Nyquist row and column."""
        k1, k2 = grid32.derivative_wavenumbers
        assert np.all(k1[16, :] == 0)
        assert np.all(k2[:, 16] == 0)
        assert k1[1, 0] == pytest.approx(1.0)

    def test_derivative_null_modes(self):
        """Only the three pure Nyquist modes lose every first derivative."""
        grid = SpectralGrid(8, 1.0)
        null = np.argwhere(grid.derivative_null_modes)
        assert sorted(map(tuple, null)) == [(0, 4), (4, 0), (4, 4)]
        assert grid.derivative_k_squared[4, 1] == pytest.approx((2 * np.pi) ** 2)

    def test_dealias_mask(self, grid32):
        """2/3 rule keeps |m_i| <= 32/3 and drops the highest modes."""
        assert grid32.dealias_mask[0, 0]
        assert grid32.dealias_mask[10, 10]
        assert not grid32.dealias_mask[11, 0]
        assert not grid32.dealias_mask[0, 16]

    def test_field_shape_checked(self, grid32):
        """Samples of the wrong shape are a structural error."""
        with pytest.raises(GridMismatchError):
            Field(grid32, np.zeros((16, 16)))

    def test_vector_components_must_agree(self, grid32, grid64):
        """Components on different grids or representations are rejected."""
        with pytest.raises(GridMismatchError):
            VectorField((Field.zeros(grid32), Field.zeros(grid64)))
        with pytest.raises(GridMismatchError):
            VectorField((Field.zeros(grid32), SpectralField.zeros(grid32)))


class TestTransforms:
    """Test suite for to_spectral / to_physical."""

    def test_constant_field(self, grid32):
        """A constant a has coefficient a at mode 0 and zero elsewhere."""
        F = to_spectral(Field.constant(grid32, 2.5))
        assert F.coefficients[0, 0] == pytest.approx(2.5)
        rest = F.coefficients.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-14

    def test_cosine_mode(self):
        """cos(2 pi x1 / L) has coefficients 1/2 at m = (+-1, 0)."""
        grid = SpectralGrid(16, 3.0)
        x1, _ = grid.coordinates
        F = to_spectral(Field(grid, np.cos(2 * np.pi * x1 / grid.L)))
        assert F.coefficients[1, 0] == pytest.approx(0.5)
        assert F.coefficients[-1, 0] == pytest.approx(0.5)
        F.coefficients[1, 0] = F.coefficients[-1, 0] = 0
        assert _max_abs(F) < 1e-14

    def test_round_trip(self, grid64, random_field):
        """Physical -> spectral -> physical is the identity to 1e-12."""
        f = random_field(grid64, 20)
        back = to_physical(to_spectral(f))
        assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * np.max(np.abs(f.samples))

    def test_parseval(self, grid64, random_field):
        """Quadrature and coefficient sums of |f|^2 agree."""
        assert parseval_defect(random_field(grid64, 20)) <= 1e-10

    def test_hermitian_symmetry(self, grid32, random_field):
        """Real fields have Hermitian-symmetric coefficients."""
        assert to_spectral(random_field(grid32, 8)).hermitian_defect() < 1e-14

    def test_hermitian_symmetry_nyquist_lines(self, grid32, rng):
        """The symmetry holds on the Nyquist row and column too, indices taken mod N."""
        F = to_spectral(_white_noise(grid32, rng))
        assert F.hermitian_defect() <= 1e-14 * _max_abs(F)
        bad = F.coefficients.copy()
        bad[16, 3] += 1j
        assert SpectralField(grid32, bad).hermitian_defect() > 0.5

    def test_physical_norm_matches_spectral(self, grid32, random_velocity):
        """Vector L^2 norms agree in both representations."""
        u = random_velocity(grid32, 6)
        assert physical_l2_norm(u) == pytest.approx(l2_norm(to_spectral(u)), rel=1e-12)

    def test_wrong_representation(self, grid32):
        """to_physical of a physical field is a structural error."""
        with pytest.raises(GridMismatchError):
            to_physical(Field.zeros(grid32))


class TestMultipliers:
    """Test suite for diagonal Fourier multipliers."""

    def test_frac_lap_symbol_unit_torus(self):
        """L = 1, m = (1, 0), alpha = 1 gives 4 pi^2."""
        symbol = fractional_laplacian_symbol(SpectralGrid(8, 1.0), 1.0)
        assert symbol[1, 0] == pytest.approx(4 * np.pi ** 2)
        assert symbol[0, 0] == 0

    def test_frac_lap_annihilates_constants(self, grid32):
        """(-Laplacian)^alpha of a constant is zero."""
        out = fractional_laplacian(to_spectral(Field.constant(grid32, 3.0)), 0.75)
        assert _max_abs(out) == 0

    def test_frac_lap_composition(self, grid64, random_field):
        """Two half powers compose to the full Laplacian."""
        F = to_spectral(random_field(grid64, 20))
        twice = fractional_laplacian(fractional_laplacian(F, 0.5), 0.5)
        once = fractional_laplacian(F, 1.0)
        assert _max_abs(_sub(twice, once)) <= 1e-10 * _max_abs(once)

    def test_frac_lap_matches_laplacian(self, grid32, random_field):
        """alpha = 1 agrees with minus the spectral Laplacian."""
        F = to_spectral(random_field(grid32, 8))
        lap = differentiate(F, 'laplacian')
        frac = fractional_laplacian(F, 1.0)
        assert np.allclose(frac.coefficients, -lap.coefficients, rtol=0, atol=1e-12)

    def test_negative_power_symbol(self, grid32):
        """|k|^-2 inverts k^2 away from the mean mode."""
        inv = negative_power_symbol(grid32, -2.0)
        assert inv[0, 0] == 0
        assert inv[3, 4] * grid32.k_squared[3, 4] == pytest.approx(1.0)

    def test_friedrichs_keeps_inner_annulus(self, grid32):
        """Modes with 1/k <= |xi| <= k pass unchanged; the mean is removed."""
        mask = friedrichs_mask(grid32, 2.0)
        xi = grid32.xi_norm
        assert np.all(mask[(xi >= 0.5) & (xi <= 2.0)] == 1)
        assert mask[0, 0] == 0
        assert friedrichs_mask(grid32, 2.0, annulus=False)[0, 0] == 1

    def test_friedrichs_constant_field(self, grid32):
        """J_k of a constant is zero."""
        out = friedrichs_truncate(to_spectral(Field.constant(grid32, 1.0)), 3.0)
        assert _max_abs(out) == 0

    def test_friedrichs_saturates(self, grid32, random_field):
        """k beyond the grid band is the identity on mean-zero fields."""
        F = to_spectral(random_field(grid32, 8))
        out = friedrichs_truncate(F, 1e6)
        assert _max_abs(_sub(out, F)) <= 1e-15 * _max_abs(F)

    def test_friedrichs_rejects_nonpositive(self, grid32):
        """k must be positive."""
        with pytest.raises(ParameterError):
            friedrichs_mask(grid32, 0.0)

    def test_mollifier_value(self):
        """L = 1, m = (1, 0), eps = 1 / (2 pi) gives exp(-1)."""
        symbol = mollifier_symbol(SpectralGrid(8, 1.0), 1.0 / (2 * np.pi))
        assert symbol[1, 0] == pytest.approx(np.exp(-1.0))
        assert symbol[0, 0] == 1.0

    def test_mollifier_limit(self, grid32, random_field):
        """eps -> 0 recovers the field within the multiplier error."""
        F = to_spectral(random_field(grid32, 6))
        eps = 1e-4
        out = mollify(F, eps)
        bound = 1 - np.exp(-(eps ** 2) * float(np.max(grid32.k_squared[F.coefficients != 0])))
        assert _max_abs(_sub(out, F)) <= bound * _max_abs(F) + 1e-15

    def test_mollifier_contracts(self, grid32, random_field):
        """Mollifying never increases the L^2 norm."""
        F = to_spectral(random_field(grid32, 8))
        assert l2_norm(mollify(F, 0.3)) <= l2_norm(F)

    def test_dealias(self, grid32):
        """Band-limited fields are unchanged; the highest mode is removed."""
        x1, x2 = grid32.coordinates
        low = to_spectral(Field(grid32, np.cos(3 * x1) * np.sin(5 * x2)))
        assert _max_abs(_sub(dealias(low), low)) <= 1e-15
        high = to_spectral(Field(grid32, np.cos(15 * x1)))
        assert _max_abs(dealias(high)) == 0

    def test_vector_multiplier_keeps_flag(self, grid32, random_velocity):
        """Multipliers act component-wise and keep the divergence-free flag."""
        u = to_spectral(random_velocity(grid32))
        out = apply_multiplier(u, 2.0)
        assert out.divergence_free
        assert np.allclose(out[0].coefficients, 2 * u[0].coefficients)


class TestProjection:
    """Test suite for the Helmholtz-Leray projection."""

    def test_gradient_removed(self, grid32, random_field):
        """The gradient of a mean-zero scalar projects to zero."""
        grad = differentiate(to_spectral(random_field(grid32, 8)), 'grad')
        out = helmholtz_project(grad)
        assert l2_norm(out) <= 1e-12 * l2_norm(grad)

    def test_shear_unchanged(self, grid32):
        """(sin(x2), 0) is divergence free and passes unchanged."""
        _, x2 = grid32.coordinates
        u = to_spectral(VectorField((Field(grid32, np.sin(x2)), Field.zeros(grid32))))
        out = helmholtz_project(u)
        assert l2_norm(_sub(out, u)) <= 1e-14 * l2_norm(u)

    def test_compressive_mode_removed(self, grid32):
        """(sin(x1), 0) is parallel to its wavevector and projects to zero."""
        x1, _ = grid32.coordinates
        u = to_spectral(VectorField((Field(grid32, np.sin(x1)), Field.zeros(grid32))))
        assert l2_norm(helmholtz_project(u)) < 1e-14

    def test_idempotent_and_self_adjoint(self, grid64, random_field):
        """P P = P and <P u, w> = <u, P w>."""
        def raw():
            return to_spectral(VectorField((random_field(grid64, 20), random_field(grid64, 20))))
        u, w = raw(), raw()
        once = helmholtz_project(u)
        assert l2_norm(_sub(helmholtz_project(once), once)) <= 1e-12 * l2_norm(once)
        lhs = l2_inner(once, w)
        rhs = l2_inner(u, helmholtz_project(w))
        assert abs(lhs - rhs) <= 1e-10 * l2_norm(u) * l2_norm(w)

    def test_output_divergence_free(self, grid32, random_field):
        """div P u vanishes exactly on the grid."""
        u = to_spectral(VectorField((random_field(grid32, 15), random_field(grid32, 15))))
        div = differentiate(helmholtz_project(u), 'div')
        assert _max_abs(div) <= 1e-12

    def test_full_spectrum_stays_real_and_solenoidal(self, grid32, rng):
        """On white noise the projection is divergence free on every mode and stays real."""
        u = to_spectral(VectorField((_white_noise(grid32, rng), _white_noise(grid32, rng))))
        out = helmholtz_project(u)
        assert _max_abs(differentiate(out, 'div')) <= 1e-12 * _max_abs(out[0])
        assert max(out[0].hermitian_defect(), out[1].hermitian_defect()) <= 1e-15
        again = to_spectral(to_physical(out))
        assert l2_norm(_sub(again, out)) <= 1e-12 * l2_norm(out)

    def test_needs_spectral_vector(self, grid32):
        """Physical input is a structural error."""
        with pytest.raises(GridMismatchError):
            helmholtz_project(VectorField.zeros(grid32))


class TestDifferentiate:
    """Test suite for spectral derivatives and Biot-Savart."""

    def test_grad_constant(self, grid32):
        """The gradient of a constant is zero."""
        grad = differentiate(to_spectral(Field.constant(grid32, 4.0)), 'grad')
        assert _max_abs(grad[0]) == 0 and _max_abs(grad[1]) == 0

    def test_curl_of_rotation(self):
        """curl2d of (-sin y, sin x) is (2 pi / L)(cos x + cos y)."""
        grid = SpectralGrid(32, 5.0)
        x1, x2 = grid.coordinates
        w = 2 * np.pi / grid.L
        u = VectorField((Field(grid, -np.sin(w * x2)), Field(grid, np.sin(w * x1))))
        curl = to_physical(differentiate(to_spectral(u), 'curl2d')).samples
        assert np.allclose(curl, w * (np.cos(w * x1) + np.cos(w * x2)), atol=1e-12)

    def test_unknown_operator(self, grid32):
        """Only grad, div, curl2d and laplacian exist."""
        with pytest.raises(ParameterError):
            differentiate(SpectralField.zeros(grid32), 'hessian')

    def test_bernstein(self, grid64, random_field):
        """||grad f|| <= 2 pi k ||f|| for f supported in |xi| <= k."""
        k = 2.0
        F = friedrichs_truncate(to_spectral(random_field(grid64, 25)), k, annulus=False)
        assert l2_norm(differentiate(F, 'grad')) <= 2 * np.pi * k * l2_norm(F) * (1 + 1e-12)

    def test_div_grad_is_laplacian(self, grid32, rng):
        """div(grad f) equals laplacian(f) on white noise, Nyquist lines included."""
        F = to_spectral(_white_noise(grid32, rng))
        lap = differentiate(F, 'laplacian')
        composed = differentiate(differentiate(F, 'grad'), 'div')
        assert _max_abs(_sub(composed, lap)) <= 1e-10 * _max_abs(lap)

    def test_laplacian_off_nyquist(self, grid32, rng):
        """laplacian and -fractional_laplacian(., 1) part ways only on the Nyquist lines."""
        F = to_spectral(_white_noise(grid32, rng))
        gap = np.abs(differentiate(F, 'laplacian').coefficients
                     + fractional_laplacian(F, 1.0).coefficients)
        m1, m2 = grid32.modes
        nyquist = (np.abs(m1) == 16) | (np.abs(m2) == 16)
        assert np.max(gap[~nyquist]) <= 1e-10
        assert np.max(gap[nyquist]) > 1.0

    def test_biot_savart_zero(self, grid32):
        """v = 0 gives u = 0."""
        u = biot_savart(SpectralField.zeros(grid32))
        assert _max_abs(u[0]) == 0 and _max_abs(u[1]) == 0

    def test_biot_savart_round_trip(self, grid64, random_velocity):
        """curl2d(BS(v)) = v and BS(curl2d u) = u for mean-zero divergence-free u."""
        u = to_spectral(random_velocity(grid64, 20))
        v = differentiate(u, 'curl2d')
        back = biot_savart(v)
        assert _max_abs(_sub(differentiate(back, 'curl2d'), v)) <= 1e-10 * _max_abs(v)
        assert l2_norm(_sub(back, u)) <= 1e-10 * l2_norm(u)
        assert back.divergence_free

    def test_biot_savart_white_noise(self, grid32, rng):
        """Any mean-free vorticity without pure Nyquist content is recovered exactly."""
        coeffs = to_spectral(_white_noise(grid32, rng)).coefficients.copy()
        coeffs[0, 0] = 0
        coeffs[grid32.derivative_null_modes] = 0
        v = SpectralField(grid32, coeffs)
        u = biot_savart(v)
        assert _max_abs(_sub(differentiate(u, 'curl2d'), v)) <= 1e-12 * _max_abs(v)
        assert _max_abs(differentiate(u, 'div')) <= 1e-12 * _max_abs(u[0])

    def test_biot_savart_rejects_nyquist(self, grid32):
        """cos(16 x1) sits on the (N/2, 0) mode, which no real grid velocity curls into."""
        x1, _ = grid32.coordinates
        with pytest.raises(PreconditionError, match='Nyquist'):
            biot_savart(to_spectral(Field(grid32, np.cos(16 * x1))))

    def test_biot_savart_nonzero_mean(self, grid32):
        """A vorticity with nonzero mean has no periodic velocity."""
        with pytest.raises(PreconditionError):
            biot_savart(to_spectral(Field.constant(grid32, 1.0)))


class TestProductsAndRestriction:
    """Test suite for dealiased products and band-limited restriction."""

    def test_multiply_exact_for_low_modes(self, grid32):
        """sin(x1) * sin(x1) = (1 - cos(2 x1)) / 2 exactly."""
        x1, _ = grid32.coordinates
        s = Field(grid32, np.sin(x1))
        out = to_physical(multiply(s, s)).samples
        assert np.allclose(out, 0.5 * (1 - np.cos(2 * x1)), atol=1e-14)

    def test_multiply_matches_direct_convolution(self, rng):
        """On N = 16 the re-masked product of masked fields is their exact convolution."""
        grid = SpectralGrid(16, 2 * np.pi)
        m_max = 5
        size = 2 * m_max + 1
        fc = Utils.random_band_coefficients(rng, m_max)
        gc = Utils.random_band_coefficients(rng, m_max)
        fc[m_max, m_max] = 0.7
        f = to_physical(SpectralField(grid, Utils.embed_band_coefficients(fc, grid.N)))
        g = to_physical(SpectralField(grid, Utils.embed_band_coefficients(gc, grid.N)))
        out = multiply(f, g).coefficients
        direct = np.zeros((2 * size - 1, 2 * size - 1), dtype=complex)
        for a in range(size):
            for b in range(size):
                direct[a:a + size, b:b + size] += fc[a, b] * gc
        idx = np.arange(-m_max, m_max + 1) % grid.N
        kept = direct[m_max:3 * m_max + 1, m_max:3 * m_max + 1]
        assert np.allclose(out[np.ix_(idx, idx)], kept, rtol=0, atol=1e-12)
        assert np.all(out[~grid.dealias_mask] == 0)

    def test_multiply_grid_mismatch(self, grid32, grid64):
        """Factors on different grids are rejected."""
        with pytest.raises(GridMismatchError):
            multiply(Field.zeros(grid32), Field.zeros(grid64))

    def test_restrict_keeps_resolved_modes(self, grid64):
        """Restriction to a coarser grid keeps band-limited fields exactly."""
        coarse = SpectralGrid(32, grid64.L)
        x1, x2 = grid64.coordinates
        F = to_spectral(Field(grid64, np.cos(3 * x1) + np.sin(7 * x2)))
        out = to_physical(restrict(F, coarse))
        c1, c2 = coarse.coordinates
        assert np.allclose(out.samples, np.cos(3 * c1) + np.sin(7 * c2), atol=1e-13)

    def test_restrict_rejects_finer(self, grid32, grid64):
        """Restriction only goes to coarser grids."""
        with pytest.raises(GridMismatchError):
            restrict(SpectralField.zeros(grid32), grid64)
