"""Variational quantities evaluated on a field.

All functionals share one transform convention (see :mod:`dipgpe.grid`):

    grad_sq  = |grad u|_2^2                       (kinetic, >= 0)
    quartic  = (2 pi)^-3 int (l1 + l2 K_hat) ||u|^2_hat|^2   (contact + dipolar)
    quintic  = l3 |u|_5^5
    mass     = |u|_2^2
    energy   = 1/2 grad_sq + 1/2 quartic + 2/5 quintic
    virial   = grad_sq + 3/2 quartic + 9/5 quintic
    beta     = -(1/2 grad_sq + quartic + quintic) / mass

``beta`` is the Lagrange multiplier of the mass constraint (the standing
wave frequency); for non-critical fields it is still defined by the same
formula, which gives iterative solvers a continuous multiplier estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GridMismatch, ZeroMass
from .grid import Field, GridSpec
from .kernel import CouplingParams, KernelTable


@dataclass(frozen=True)
class Diagnostics:
    """The scalar functionals of one field, the report unit of every run."""

    grad_sq: float
    quartic: float
    quintic: float
    mass: float
    energy: float
    virial: float
    beta: float

    def as_dict(self) -> dict:
        return {
            "grad_sq": self.grad_sq,
            "quartic": self.quartic,
            "quintic": self.quintic,
            "mass": self.mass,
            "energy": self.energy,
            "virial": self.virial,
            "beta": self.beta,
        }


class _Evaluation(NamedTuple):
    """Raw sums plus reusable spectra (internal fast path)."""

    grad_sq: float
    quartic: float
    quintic: float
    mass: float
    spectrum: np.ndarray
    density_spectrum: np.ndarray
    density: np.ndarray


def _require_same_grid(a: GridSpec, b: GridSpec):
    if a != b:
        raise GridMismatch(f"grids differ: {a.n}x{a.l} vs {b.n}x{b.l}")


def _evaluate(
    values: np.ndarray,
    grid: GridSpec,
    interaction_mult: np.ndarray,
    lambda3: float,
) -> _Evaluation:
    h = grid.cell_volume
    spectral_weight = h / grid.num_points  # h^2 / V
    density = values.real**2 + values.imag**2

    spectrum = np.fft.fftn(values)
    mag2 = spectrum.real**2 + spectrum.imag**2
    grad_sq = spectral_weight * float(np.sum(grid.xi_sq * mag2))

    density_spectrum = np.fft.fftn(density)
    wmag2 = density_spectrum.real**2 + density_spectrum.imag**2
    quartic = spectral_weight * float(np.sum(interaction_mult * wmag2))

    quintic = lambda3 * h * float(np.sum(density**2.5))
    mass = h * float(np.sum(density))
    return _Evaluation(grad_sq, quartic, quintic, mass, spectrum, density_spectrum, density)


def _assemble(grad_sq: float, quartic: float, quintic: float, mass: float) -> Diagnostics:
    energy = 0.5 * grad_sq + 0.5 * quartic + 0.4 * quintic
    virial = grad_sq + 1.5 * quartic + 1.8 * quintic
    if mass > 0.0:
        beta = -(0.5 * grad_sq + quartic + quintic) / mass
    else:
        beta = math.nan  # undefined for the zero field
    return Diagnostics(grad_sq, quartic, quintic, mass, energy, virial, beta)


def compute_diagnostics(u: Field, k: KernelTable, p: CouplingParams) -> Diagnostics:
    """Evaluate every functional on ``u`` with the couplings in ``p``."""
    _require_same_grid(u.grid, k.grid)
    mult = p.lambda1 + p.lambda2 * k.multiplier
    ev = _evaluate(u.values, u.grid, mult, p.lambda3)
    return _assemble(ev.grad_sq, ev.quartic, ev.quintic, ev.mass)


class _GradientPieces(NamedTuple):
    """Shared building blocks of the energy and virial gradients."""

    half_kinetic: np.ndarray  # -1/2 lap u
    pair_potential: np.ndarray  # l1 |u|^2 + l2 (kernel * |u|^2), real
    quintic_potential: np.ndarray  # l3 |u|^3, real


def _gradient_pieces(
    values: np.ndarray,
    grid: GridSpec,
    kernel_mult: np.ndarray,
    p: CouplingParams,
    spectrum: np.ndarray | None = None,
    density_spectrum: np.ndarray | None = None,
    density: np.ndarray | None = None,
) -> _GradientPieces:
    if density is None:
        density = values.real**2 + values.imag**2
    if spectrum is None:
        spectrum = np.fft.fftn(values)
    half_kinetic = 0.5 * np.fft.ifftn(grid.xi_sq * spectrum)
    pair = p.lambda1 * density
    if p.lambda2 != 0.0:
        if density_spectrum is None:
            density_spectrum = np.fft.fftn(density)
        pair = pair + p.lambda2 * np.fft.ifftn(kernel_mult * density_spectrum).real
    return _GradientPieces(half_kinetic, pair, p.lambda3 * density**1.5)


def _gradient_values(
    values: np.ndarray,
    grid: GridSpec,
    kernel_mult: np.ndarray,
    p: CouplingParams,
    spectrum: np.ndarray | None = None,
    density_spectrum: np.ndarray | None = None,
    density: np.ndarray | None = None,
) -> np.ndarray:
    pieces = _gradient_pieces(
        values, grid, kernel_mult, p, spectrum, density_spectrum, density
    )
    return pieces.half_kinetic + (
        pieces.pair_potential + pieces.quintic_potential
    ) * values


def energy_gradient(u: Field, k: KernelTable, p: CouplingParams) -> Field:
    """First variation of the energy with respect to 2 Re <.,.>.

    Returns -1/2 lap(u) + l1 |u|^2 u + l2 (K * |u|^2) u + l3 |u|^3 u, i.e.
    the left side of the stationary equation with zero multiplier, so that
    (E(u + eps v) - E(u)) / eps -> 2 Re <g, v> in the h-weighted inner
    product.  This convention fixes all step-size semantics in the solver.
    """
    _require_same_grid(u.grid, k.grid)
    return Field(u.grid, _gradient_values(u.values, u.grid, k.multiplier, p))


def chemical_potential(d: Diagnostics) -> float:
    """Multiplier of the mass constraint from the first stationarity identity."""
    if d.mass <= 0.0:
        raise ZeroMass("chemical potential undefined for zero-mass field")
    return -(0.5 * d.grad_sq + d.quartic + d.quintic) / d.mass


def el_residual(
    u: Field,
    beta: float,
    k: KernelTable,
    p: CouplingParams,
    weighted: bool = False,
) -> float:
    """Relative L2 residual of the stationary equation, |g + beta u| / |u|.

    With ``weighted=True`` the residual field is damped by
    (1 + |xi|^2)^(-1/2) in frequency space before taking the norm (a
    negative-order Sobolev variant, reported alongside the plain one).
    """
    _require_same_grid(u.grid, k.grid)
    g = u.grid
    denom = math.sqrt(g.cell_volume * float(np.sum(u.values.real**2 + u.values.imag**2)))
    if denom == 0.0:
        raise ZeroMass("residual undefined for zero-mass field")
    r = _gradient_values(u.values, g, k.multiplier, p) + beta * u.values
    if weighted:
        spec = np.fft.fftn(r)
        mag2 = (spec.real**2 + spec.imag**2) / (1.0 + g.xi_sq)
        num = math.sqrt(g.cell_volume / g.num_points * float(np.sum(mag2)))
    else:
        num = math.sqrt(g.cell_volume * float(np.sum(r.real**2 + r.imag**2)))
    return num / denom
