import numpy as np
import pytest
from scipy.integrate import quad


@pytest.fixture(scope="session")
def gaussian_norm_oracle():
    """Radial quadrature of |u|^p for the unit-mass, unit-width Gaussian.

    u(r) = pi^(-3/4) exp(-r^2 / 2); the integral of |u|^p over R^3 reduces
    to a 1D radial integral, evaluated independently of any grid.
    """

    def norm_p(p: float) -> float:
        amp = np.pi ** (-0.75)

        def integrand(r):
            return 4.0 * np.pi * r**2 * (amp * np.exp(-(r**2) / 2.0)) ** p

        val, err = quad(integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-13)
        assert err < 1e-12
        return val

    return norm_p
