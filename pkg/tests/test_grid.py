"""Grid construction, transforms, quadrature, and dilation resampling."""

import numpy as np
import pytest

from dipgpe import (
    DecayViolation,
    Field,
    SpectralField,
    ValidationError,
    forward_transform,
    gradient_norm_sq,
    integrate_density,
    inverse_transform,
    make_grid,
    resample_scaled,
)

TWO_PI = 2.0 * np.pi


def mesh(grid):
    return np.meshgrid(*grid.axis_coords, indexing="ij")


def gaussian_field(grid, sigma=1.0, mass=1.0):
    x1, x2, x3 = mesh(grid)
    r2 = x1**2 + x2**2 + x3**2
    values = (np.pi * sigma**2) ** (-0.75) * np.sqrt(mass) * np.exp(-r2 / (2 * sigma**2))
    return Field(grid, values)


class TestMakeGrid:
    def test_cell_volume(self):
        g = make_grid((32, 32, 32), (TWO_PI, TWO_PI, TWO_PI))
        assert g.cell_volume == pytest.approx(TWO_PI**3 / 32**3, rel=1e-15)

    def test_frequency_set(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        freqs = np.sort(g.axis_freqs[0])
        assert np.allclose(freqs, TWO_PI * np.arange(-4, 4))

    def test_rejects_odd(self):
        with pytest.raises(ValidationError):
            make_grid((7, 8, 8), (1.0, 1.0, 1.0))

    def test_rejects_tiny(self):
        with pytest.raises(ValidationError):
            make_grid((4, 8, 8), (1.0, 1.0, 1.0))

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValidationError):
            make_grid((8, 8, 8), (1.0, 0.0, 1.0))

    def test_field_shape_and_finiteness(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        with pytest.raises(ValidationError):
            Field(g, np.zeros((8, 8, 4)))
        bad = np.zeros(g.shape)
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValidationError):
            Field(g, bad)


class TestForwardTransform:
    def test_constant_field(self):
        g = make_grid((16, 16, 16), (3.0, 2.0, 1.0))
        a = 0.7 - 0.2j
        s = forward_transform(Field(g, np.full(g.shape, a)))
        assert s.coefficients[0, 0, 0] == pytest.approx(a * g.volume, rel=1e-13)
        rest = s.coefficients.copy()
        rest[0, 0, 0] = 0.0
        assert np.max(np.abs(rest)) < 1e-12 * abs(a) * g.volume

    def test_plane_wave_single_coefficient(self):
        g = make_grid((16, 16, 16), (TWO_PI, TWO_PI, TWO_PI))
        x1, x2, x3 = mesh(g)
        # grid-aligned wave vector (2, -3, 1)
        f = Field(g, np.exp(1j * (2 * x1 - 3 * x2 + 1 * x3)))
        s = forward_transform(f)
        coeffs = s.coefficients.copy()
        peak = coeffs[2, -3 % 16, 1]
        assert peak == pytest.approx(g.volume, rel=1e-12)
        coeffs[2, -3 % 16, 1] = 0.0
        assert np.max(np.abs(coeffs)) < 1e-10 * g.volume

    def test_parseval_against_direct_sum(self):
        # direct O(N^2) evaluation of the transform on a tiny grid
        g = make_grid((8, 8, 8), (2.0, 1.5, 1.0))
        rng = np.random.default_rng(7)
        f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        s = forward_transform(f)

        xi = np.meshgrid(*g.axis_freqs, indexing="ij")
        direct = np.zeros(g.shape, dtype=complex)
        flat = f.values.ravel()
        # brute force: loop over all frequencies
        xs = np.stack([c.ravel() for c in mesh(g)], axis=1)
        for idx in np.ndindex(g.shape):
            k = np.array([xi[0][idx], xi[1][idx], xi[2][idx]])
            direct[idx] = g.cell_volume * np.sum(flat * np.exp(-1j * (xs @ k)))
        assert np.max(np.abs(direct - s.coefficients)) < 1e-12 * np.max(np.abs(direct))

        lhs = integrate_density(f, 2)
        rhs = np.sum(np.abs(s.coefficients) ** 2) / g.volume
        assert rhs == pytest.approx(lhs, rel=1e-12)


class TestInverseTransform:
    def test_round_trip(self):
        g = make_grid((12, 16, 8), (2.0, 3.0, 1.0))
        rng = np.random.default_rng(3)
        f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        back = inverse_transform(forward_transform(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-13 * np.max(np.abs(f.values))

    def test_unit_coefficient_is_plane_wave(self):
        g = make_grid((16, 16, 16), (TWO_PI, TWO_PI, TWO_PI))
        coeffs = np.zeros(g.shape, dtype=complex)
        coeffs[3, 0, 0] = 1.0
        f = inverse_transform(SpectralField(g, coeffs))
        x1, _, _ = mesh(g)
        expected = np.exp(1j * 3 * x1) / g.volume
        assert np.max(np.abs(f.values - expected)) < 1e-13

    def test_zero_spectrum(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        f = inverse_transform(SpectralField(g, np.zeros(g.shape, dtype=complex)))
        assert np.all(f.values == 0)


class TestGradientNormSq:
    def test_plane_wave(self):
        g = make_grid((16, 16, 16), (TWO_PI, TWO_PI, TWO_PI))
        x1, _, _ = mesh(g)
        f = Field(g, np.sqrt(1.0 / g.volume) * np.exp(1j * x1))
        assert gradient_norm_sq(f) == pytest.approx(1.0, rel=1e-12)

    def test_constant(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        assert gradient_norm_sq(Field(g, np.full(g.shape, 2.0))) == 0.0

    def test_gaussian_closed_form(self):
        g = make_grid((64, 64, 64), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0, mass=1.0)
        assert gradient_norm_sq(f) == pytest.approx(1.5, abs=1e-10)

    def test_positive_on_random(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        rng = np.random.default_rng(11)
        f = Field(g, rng.standard_normal(g.shape))
        assert gradient_norm_sq(f) > 0


class TestIntegrateDensity:
    def test_mass_of_plane_wave(self):
        g = make_grid((16, 16, 16), (TWO_PI, TWO_PI, TWO_PI))
        x1, _, _ = mesh(g)
        c = 0.7
        f = Field(g, np.sqrt(c / g.volume) * np.exp(1j * 2 * x1))
        assert integrate_density(f, 2) == pytest.approx(c, rel=1e-13)

    def test_gaussian_quartic_and_quintic(self, gaussian_norm_oracle):
        g = make_grid((64, 64, 64), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0, mass=1.0)
        # closed forms, cross-checked by the radial quadrature oracle
        p4 = (2 * np.pi) ** -1.5
        p5 = (2.0 / 5.0) ** 1.5 * np.pi**-2.25
        assert gaussian_norm_oracle(4) == pytest.approx(p4, rel=1e-12)
        assert gaussian_norm_oracle(5) == pytest.approx(p5, rel=1e-12)
        assert integrate_density(f, 4) == pytest.approx(p4, abs=1e-10)
        assert integrate_density(f, 5) == pytest.approx(p5, abs=1e-9)

    def test_rejects_small_exponent(self):
        g = make_grid((8, 8, 8), (1.0, 1.0, 1.0))
        with pytest.raises(ValidationError):
            integrate_density(Field(g, np.ones(g.shape)), 0.5)


class TestResampleScaled:
    def test_identity(self):
        g = make_grid((32, 32, 32), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0)
        out = resample_scaled(f, 1.0)
        assert np.array_equal(out.values, f.values)

    def test_gaussian_halving(self):
        g = make_grid((64, 64, 64), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0, mass=1.0)
        out = resample_scaled(f, 2.0)
        expected = gaussian_field(g, sigma=0.5, mass=1.0)
        assert np.max(np.abs(out.values - expected.values)) < 1e-10
        assert integrate_density(out, 2) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("t,norm_rel", [(0.7, 1e-7), (1.3, 1e-7), (2.0, 2e-6)])
    def test_scaling_laws(self, t, norm_rel):
        # the kinetic coefficient is spectral and stays at 1e-8 even at
        # t = 2; the pointwise 4th/5th-power quadratures lose accuracy as
        # the dilated state narrows toward the grid spacing
        g = make_grid((64, 64, 64), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0, mass=1.0)
        out = resample_scaled(f, t)
        assert gradient_norm_sq(out) == pytest.approx(t**2 * 1.5, rel=1e-8)
        assert integrate_density(out, 4) == pytest.approx(
            t**3 * (2 * np.pi) ** -1.5, rel=norm_rel
        )
        assert integrate_density(out, 5) == pytest.approx(
            t**4.5 * (2.0 / 5.0) ** 1.5 * np.pi**-2.25, rel=norm_rel
        )

    def test_mass_preserved_exactly(self):
        g = make_grid((48, 48, 48), (16.0, 16.0, 16.0))
        f = gaussian_field(g, sigma=1.0, mass=0.8)
        out = resample_scaled(f, 1.618)
        assert integrate_density(out, 2) == pytest.approx(0.8, rel=1e-12)

    def test_decay_violation(self):
        g = make_grid((16, 16, 16), (4.0, 4.0, 4.0))
        f = gaussian_field(g, sigma=1.0)  # tails far above 1e-10 on this box
        with pytest.raises(DecayViolation):
            resample_scaled(f, 1.2)

    def test_rejects_nonpositive_t(self):
        g = make_grid((32, 32, 32), (12.0, 12.0, 12.0))
        f = gaussian_field(g)
        with pytest.raises(ValidationError):
            resample_scaled(f, 0.0)
