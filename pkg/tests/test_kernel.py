"""Dipolar multiplier values, table bounds, and the interaction constant."""

import numpy as np
import pytest

from dipgpe import (
    CouplingParams,
    ValidationError,
    build_kernel_table,
    dipole_fourier,
    make_grid,
    xi_constant,
)

FOUR_THIRDS_PI = 4.0 * np.pi / 3.0
EIGHT_THIRDS_PI = 8.0 * np.pi / 3.0


class TestDipoleFourier:
    def test_axial_endpoint(self):
        assert dipole_fourier((0, 0, 1)) == pytest.approx(EIGHT_THIRDS_PI, rel=1e-15)

    def test_planar_endpoint(self):
        assert dipole_fourier((1, 0, 0)) == pytest.approx(-FOUR_THIRDS_PI, rel=1e-15)
        assert dipole_fourier((0, 1, 0)) == pytest.approx(-FOUR_THIRDS_PI, rel=1e-15)

    def test_magic_angle_zero(self):
        assert dipole_fourier((1, 1, 1)) == 0.0

    def test_origin_convention(self):
        assert dipole_fourier((0, 0, 0)) == 0.0

    def test_degree_zero_homogeneity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            xi = rng.standard_normal(3)
            s = 10.0 ** rng.uniform(-3, 3)
            assert dipole_fourier(s * xi) == pytest.approx(
                dipole_fourier(xi), rel=1e-12
            )


class TestKernelTable:
    def test_entries_within_range(self):
        g = make_grid((24, 16, 20), (5.0, 7.0, 3.0))
        t = build_kernel_table(g)
        assert t.multiplier.min() >= -FOUR_THIRDS_PI - 1e-14
        assert t.multiplier.max() <= EIGHT_THIRDS_PI + 1e-14

    def test_zero_frequency_entry(self):
        g = make_grid((16, 16, 16), (2.0, 2.0, 2.0))
        assert build_kernel_table(g).multiplier[0, 0, 0] == 0.0

    def test_even_under_reflection(self):
        g = make_grid((16, 16, 16), (2.0, 3.0, 4.0))
        m = t = build_kernel_table(g).multiplier
        # xi -> -xi maps index j to -j mod n
        flipped = m[
            np.ix_(
                (-np.arange(16)) % 16, (-np.arange(16)) % 16, (-np.arange(16)) % 16
            )
        ]
        assert np.array_equal(m, flipped)

    def test_endpoints_attained_on_axis(self):
        g = make_grid((16, 16, 16), (2.0, 2.0, 2.0))
        m = build_kernel_table(g).multiplier
        assert m[0, 0, 1] == pytest.approx(EIGHT_THIRDS_PI, rel=1e-14)
        assert m[1, 0, 0] == pytest.approx(-FOUR_THIRDS_PI, rel=1e-14)

    def test_matches_pointwise_formula(self):
        g = make_grid((8, 8, 8), (1.0, 2.0, 3.0))
        m = build_kernel_table(g).multiplier
        f1, f2, f3 = g.axis_freqs
        for i in range(8):
            for j in range(8):
                for k in range(8):
                    assert m[i, j, k] == pytest.approx(
                        dipole_fourier((f1[i], f2[j], f3[k])), abs=1e-14
                    )


class TestXiConstant:
    def test_pure_contact(self):
        assert xi_constant(1.0, 0.0) == pytest.approx(1.0 / (8 * np.pi**3), rel=1e-15)

    def test_pure_dipolar(self):
        assert xi_constant(0.0, 1.0) == pytest.approx(1.0 / (3 * np.pi**2), rel=1e-15)

    def test_mixed_sign_max(self):
        expected = (4.0 + FOUR_THIRDS_PI) / (2 * np.pi) ** 3
        assert xi_constant(-4.0, 1.0) == pytest.approx(expected, rel=1e-15)

    def test_uniform_bound_over_table(self):
        g = make_grid((16, 16, 16), (3.0, 4.0, 5.0))
        table = build_kernel_table(g)
        rng = np.random.default_rng(17)
        for _ in range(10):
            l1, l2 = rng.uniform(-10, 10, size=2)
            bound = (2 * np.pi) ** 3 * xi_constant(l1, l2)
            assert np.max(np.abs(l1 + l2 * table.multiplier)) <= bound + 1e-12


class TestCouplingParams:
    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValidationError):
            CouplingParams(1.0, 0.0, -1.0, 0.0)

    def test_allows_zero_quintic(self):
        # plain functional evaluation has no sign constraint
        p = CouplingParams(0.0, 0.0, 0.0, 1.0)
        assert p.lambda3 == 0.0
