"""The mass-preserving dilation reduced to its scaling coefficients.

Under u -> t^{3/2} u(t x) the three functional coefficients scale as

    grad_sq: t^2,    quartic: t^3,    quintic: t^{9/2},

so energy and virial along the dilation are explicit one-variable
functions of (grad_sq, quartic, quintic).  Everything in this module
operates on that coefficient triple exactly, in floating point, with no
grid involved; only :func:`rescale_to_manifold` touches fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadEndpoints, InvalidTriple, NotOnManifold, ZeroMass
from .functionals import Diagnostics, compute_diagnostics
from .grid import Field, resample_scaled
from .kernel import CouplingParams, KernelTable

_BRACKET_CAP = 200
_BISECT_CAP = 200


@dataclass(frozen=True)
class FiberTriple:
    """Scaling coefficients (grad_sq > 0, quartic, quintic < 0) of a state.

    The sign constraints are the standing assumptions of the variational
    problem: a nonzero field has positive kinetic coefficient, and a
    focusing quintic coupling makes the quintic coefficient negative.
    """

    grad_sq: float
    quartic: float
    quintic: float

    def __post_init__(self):
        vals = (self.grad_sq, self.quartic, self.quintic)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidTriple(f"non-finite triple {vals}")
        if self.grad_sq <= 0:
            raise InvalidTriple(f"kinetic coefficient {self.grad_sq} must be positive")
        if self.quintic >= 0:
            raise InvalidTriple(f"quintic coefficient {self.quintic} must be negative")

    @classmethod
    def from_diagnostics(cls, d: Diagnostics) -> "FiberTriple":
        return cls(d.grad_sq, d.quartic, d.quintic)


@dataclass(frozen=True)
class FiberResult:
    """Virial root of a fiber: location, energy there, and curvature there.

    ``curvature`` is the second t-derivative of the fiber energy at
    ``t_star``; it is negative for every valid triple (the root is the
    fiber's strict maximum, i.e. a saddle direction of the energy).
    """

    t_star: float
    energy_at_star: float
    curvature: float


def fiber_energy(f: FiberTriple, t):
    """Energy along the dilation: t^2/2 A + t^3/2 B + (2/5) t^{9/2} C."""
    t = _check_positive(t)
    return 0.5 * t**2 * f.grad_sq + 0.5 * t**3 * f.quartic + 0.4 * t**4.5 * f.quintic


def fiber_virial(f: FiberTriple, t):
    """Virial along the dilation: t^2 A + (3/2) t^3 B + (9/5) t^{9/2} C."""
    t = _check_positive(t)
    return t**2 * f.grad_sq + 1.5 * t**3 * f.quartic + 1.8 * t**4.5 * f.quintic


def _check_positive(t):
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise ValueError("fiber parameter t must be positive and finite")
    return t if t.ndim else float(t)


def solve_tstar(f: FiberTriple) -> FiberResult:
    """Locate the unique virial root along the fiber.

    Works on phi(t) = virial(t)/t^2 = A + (3/2) t B + (9/5) t^{5/2} C, which
    is positive at 0+ and falls to -infinity, with a single sign change.
    The change is bracketed by doubling (or halving) from t = 1 and then
    bisected to floating-point collapse.  Bisection is used instead of
    Newton because phi need not be monotone when the quartic coefficient is
    positive; bisection is unconditionally safe given the bracket.
    """
    a, b, c = f.grad_sq, f.quartic, f.quintic

    def phi(t: float) -> float:
        return a + 1.5 * t * b + 1.8 * t**2.5 * c

    p1 = phi(1.0)
    if p1 == 0.0:
        t_star = 1.0
    else:
        if p1 > 0:
            lo, hi = 1.0, 2.0
            for _ in range(_BRACKET_CAP):
                if phi(hi) < 0:
                    break
                lo, hi = hi, 2.0 * hi
            else:  # pragma: no cover - impossible for a valid triple
                raise RuntimeError("virial root bracketing failed (NaN contamination?)")
        else:
            lo, hi = 0.5, 1.0
            for _ in range(_BRACKET_CAP):
                if phi(lo) > 0:
                    break
                lo, hi = 0.5 * lo, lo
            else:  # pragma: no cover
                raise RuntimeError("virial root bracketing failed (NaN contamination?)")
        for _ in range(_BISECT_CAP):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            v = phi(mid)
            if v > 0:
                lo = mid
            elif v < 0:
                hi = mid
            else:
                lo = hi = mid
        t_star = 0.5 * (lo + hi)

    energy = fiber_energy(f, t_star)
    curvature = a + 3.0 * t_star * b + 6.3 * t_star**2.5 * c
    return FiberResult(t_star, float(energy), float(curvature))


def fiber_curvature_at_root(f: FiberTriple) -> float:
    """Second t-derivative of the fiber energy for a triple already at its root.

    For a virial-free triple the second derivative collapses to
    -A + (27/10) C, which is strictly negative: the energy has no local
    minimizers on the mass sphere, only the fiber maximum.
    """
    q1 = f.grad_sq + 1.5 * f.quartic + 1.8 * f.quintic
    if abs(q1) > 1e-10 * f.grad_sq:
        raise NotOnManifold(
            f"virial at unit scale is {q1:.3e} (relative {q1 / f.grad_sq:.3e}); "
            "rescale the triple to its root first"
        )
    return -f.grad_sq + 2.7 * f.quintic


def rescale_to_manifold(
    u: Field,
    k: KernelTable,
    p: CouplingParams,
    decay_tol: float = 1e-10,
) -> Field:
    """Dilate a field onto the virial-free manifold.

    Solves the root on the field's coefficient triple (exact in floating
    point) and resamples the field at that dilation, mass renormalized.
    The virial of the returned field, re-evaluated on the grid, is small
    relative to its kinetic coefficient but limited by spectral resampling
    error rather than by the root solve.
    """
    d = compute_diagnostics(u, k, p)
    if d.mass <= 0.0:
        raise ZeroMass("cannot project the zero field onto the manifold")
    res = solve_tstar(FiberTriple.from_diagnostics(d))
    return resample_scaled(u, res.t_star, decay_tol=decay_tol)


def mpg_path(
    f: FiberTriple, theta1: float, theta2: float, samples: int
) -> np.ndarray:
    """Sample (t, energy, virial) along the dilation segment [theta1, theta2].

    The path parameter m(s) = (1-s) theta1 + s theta2 is sampled uniformly
    for s in [0, 1].  For a virial-free triple with theta1 small and theta2
    large this makes the mountain-pass geometry visible: positive energy and
    virial at the left endpoint, negative at the right, and the interior
    maximum at m = 1.

    Returns an array of shape (samples, 3) with columns (t, energy, virial).
    """
    if not (np.isfinite(theta1) and np.isfinite(theta2)) or not 0 < theta1 < theta2:
        raise BadEndpoints(f"need 0 < theta1 < theta2, got ({theta1}, {theta2})")
    if samples < 3:
        raise BadEndpoints(f"need at least 3 samples, got {samples}")
    s = np.linspace(0.0, 1.0, samples)
    m = (1.0 - s) * theta1 + s * theta2
    return np.column_stack([m, fiber_energy(f, m), fiber_virial(f, m)])
