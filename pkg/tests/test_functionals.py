"""Diagnostics identities, gradient consistency, multiplier and residual."""

import numpy as np
import pytest

from dipgpe import (
    CouplingParams,
    Field,
    GridMismatch,
    ZeroMass,
    build_kernel_table,
    chemical_potential,
    compute_diagnostics,
    el_residual,
    energy_gradient,
    integrate_density,
    make_grid,
    xi_constant,
)
from dipgpe.functionals import Diagnostics, _assemble


def mesh(grid):
    return np.meshgrid(*grid.axis_coords, indexing="ij")


@pytest.fixture(scope="module")
def small_setup():
    g = make_grid((16, 16, 16), (8.0, 8.0, 8.0))
    return g, build_kernel_table(g)


def random_field(grid, seed, amplitude=1.0):
    rng = np.random.default_rng(seed)
    return Field(
        grid,
        amplitude
        * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)),
    )


class TestDiagnosticsIdentities:
    def test_linear_combinations(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(0.8, -0.3, -1.2, 1.0)
        for seed in range(5):
            d = compute_diagnostics(random_field(g, seed), kt, p)
            scale = max(abs(d.grad_sq), abs(d.quartic), abs(d.quintic))
            assert abs(d.energy - (0.5 * d.grad_sq + 0.5 * d.quartic + 0.4 * d.quintic)) <= 1e-14 * scale
            assert abs(d.virial - (d.grad_sq + 1.5 * d.quartic + 1.8 * d.quintic)) <= 1e-14 * scale
            assert abs((d.virial - 3 * d.energy) - (-0.5 * d.grad_sq + 0.6 * d.quintic)) <= 1e-13 * scale

    def test_contact_only_reduces_to_quartic_norm(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 0.0, -1.0, 1.0)
        f = random_field(g, 42)
        d = compute_diagnostics(f, kt, p)
        q4 = integrate_density(f, 4)  # independent real-space sum
        assert d.quartic == pytest.approx(q4, rel=1e-12)

    def test_plane_wave_interaction_value(self, small_setup):
        # the zero-frequency multiplier convention makes the dipolar part vanish
        g, kt = small_setup
        c = 0.9
        x1, _, _ = mesh(g)
        f = Field(g, np.sqrt(c / g.volume) * np.exp(1j * (2 * np.pi / 8.0) * 2 * x1))
        p = CouplingParams(1.0, 1.0, -1.0, c)
        d = compute_diagnostics(f, kt, p)
        assert d.quartic == pytest.approx(c**2 / g.volume, rel=1e-12)

    def test_zero_field(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 1.0, -1.0, 1.0)
        d = compute_diagnostics(Field(g, np.zeros(g.shape)), kt, p)
        assert (d.grad_sq, d.quartic, d.quintic, d.mass, d.energy, d.virial) == (
            0, 0, 0, 0, 0, 0,
        )
        assert np.isnan(d.beta)

    def test_interaction_bound(self, small_setup):
        # |quartic| <= max_xi |l1 + l2 K_hat| * |u|_4^4, the max being
        # (2 pi)^3 times the normalized interaction constant
        g, kt = small_setup
        rng = np.random.default_rng(1)
        for seed in range(5):
            l1, l2 = rng.uniform(-5, 5, size=2)
            p = CouplingParams(l1, l2, -1.0, 1.0)
            f = random_field(g, seed + 100)
            d = compute_diagnostics(f, kt, p)
            bound = (2 * np.pi) ** 3 * xi_constant(l1, l2) * integrate_density(f, 4)
            assert abs(d.quartic) <= bound + 1e-10

    def test_interaction_bound_attained_for_planar_wave(self, small_setup):
        # density varying in the plane only: the multiplier sits at its
        # planar endpoint, so same-sign couplings attain the bound
        g, kt = small_setup
        x1, _, _ = mesh(g)
        f = Field(g, 1.0 + 0.3 * np.cos(2 * np.pi / 8.0 * x1))
        l1, l2 = 1.0, -0.5
        p = CouplingParams(l1, l2, -1.0, 1.0)
        d = compute_diagnostics(f, kt, p)
        # split off the zero-frequency part (multiplier l1 there by convention)
        h = g.cell_volume
        w = np.abs(f.values) ** 2
        mean_part = (h * np.sum(w)) ** 2 / g.volume
        rest = integrate_density(f, 4) - mean_part
        expected = l1 * mean_part + (l1 + l2 * (-4 * np.pi / 3)) * rest
        assert d.quartic == pytest.approx(expected, rel=1e-12)

    def test_grid_mismatch(self, small_setup):
        g, kt = small_setup
        other = make_grid((16, 16, 16), (9.0, 8.0, 8.0))
        p = CouplingParams(1.0, 0.0, -1.0, 1.0)
        with pytest.raises(GridMismatch):
            compute_diagnostics(Field(other, np.ones(other.shape)), kt, p)


class TestEnergyGradient:
    def test_directional_derivative(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(0.7, 0.9, -1.3, 1.0)
        h = g.cell_volume
        u = random_field(g, 2, amplitude=0.1)
        v = random_field(g, 3, amplitude=0.1)
        grad = energy_gradient(u, kt, p)
        eps = 1e-5

        def energy_of(vals):
            return compute_diagnostics(Field(g, vals), kt, p).energy

        fd = (energy_of(u.values + eps * v.values) - energy_of(u.values - eps * v.values)) / (2 * eps)
        analytic = 2.0 * h * float(np.sum((grad.values.conj() * v.values).real))
        assert fd == pytest.approx(analytic, rel=1e-6)

    def test_free_gaussian_is_half_laplacian(self):
        g = make_grid((64, 64, 64), (16.0, 16.0, 16.0))
        kt = build_kernel_table(g)
        p = CouplingParams(0.0, 0.0, 0.0, 1.0)
        x1, x2, x3 = mesh(g)
        r2 = x1**2 + x2**2 + x3**2
        u = np.exp(-r2 / 2.0)
        grad = energy_gradient(Field(g, u), kt, p)
        expected = -0.5 * (r2 - 3.0) * u  # -1/2 lap of the Gaussian
        assert np.max(np.abs(grad.values - expected)) < 1e-8

    def test_zero_field_gradient(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 1.0, -1.0, 1.0)
        grad = energy_gradient(Field(g, np.zeros(g.shape)), kt, p)
        assert np.all(grad.values == 0)


class TestChemicalPotential:
    def test_forced_arithmetic(self):
        d = _assemble(2.0, 0.0, -1.0, 1.0)
        assert chemical_potential(d) == pytest.approx(0.0, abs=1e-15)
        d = _assemble(2.0, -1.0, -1.0, 2.0)
        assert chemical_potential(d) == pytest.approx(0.5, rel=1e-15)

    def test_zero_mass(self):
        d = Diagnostics(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, float("nan"))
        with pytest.raises(ZeroMass):
            chemical_potential(d)


class TestElResidual:
    def test_linear_plane_wave_eigenfunction(self):
        g = make_grid((16, 16, 16), (2 * np.pi, 2 * np.pi, 2 * np.pi))
        kt = build_kernel_table(g)
        p = CouplingParams(0.0, 0.0, 0.0, 1.0)
        x1, x2, _ = mesh(g)
        k0 = np.array([2.0, 1.0, 0.0])
        f = Field(g, np.exp(1j * (k0[0] * x1 + k0[1] * x2)) / np.sqrt(g.volume))
        beta = -0.5 * float(k0 @ k0)
        assert el_residual(f, beta, kt, p) <= 1e-12

    def test_positive_for_random(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 0.5, -1.0, 1.0)
        assert el_residual(random_field(g, 9), 0.3, kt, p) > 0

    def test_weighted_variant_smaller(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 0.5, -1.0, 1.0)
        f = random_field(g, 10)
        plain = el_residual(f, 0.1, kt, p)
        weighted = el_residual(f, 0.1, kt, p, weighted=True)
        assert 0 < weighted < plain

    def test_zero_mass(self, small_setup):
        g, kt = small_setup
        p = CouplingParams(1.0, 0.0, -1.0, 1.0)
        with pytest.raises(ZeroMass):
            el_residual(Field(g, np.zeros(g.shape)), 0.0, kt, p)
