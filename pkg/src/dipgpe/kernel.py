"""Dipolar interaction as a bounded Fourier multiplier.

The anisotropic dipole-dipole kernel (x1^2 + x2^2 - 2 x3^2)/|x|^5 acts in
frequency space as multiplication by

    K_hat(xi) = (4 pi / 3) (2 xi3^2 - xi1^2 - xi2^2) / |xi|^2,

a degree-0 homogeneous function with range [-4 pi/3, 8 pi/3].  The value at
xi = 0 is direction dependent; we set K_hat(0) = 0, the spherical average of
the multiplier (the kernel is trace free), which makes the dipolar term
vanish on spatially constant densities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import GridSpec

KHAT_MIN = -4.0 * np.pi / 3.0
KHAT_MAX = 8.0 * np.pi / 3.0


@dataclass(frozen=True)
class CouplingParams:
    """Physical couplings and target mass.

    ``lambda1`` scales the contact (cubic) term, ``lambda2`` the dipolar
    term, ``lambda3`` the quintic term, and ``mass_c`` is the squared L2
    norm the solver constrains to.  Solver-facing constructors additionally
    require ``lambda3 < 0``; plain functional evaluation does not.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    mass_c: float

    def __post_init__(self):
        vals = (self.lambda1, self.lambda2, self.lambda3, self.mass_c)
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError("couplings must be finite")
        if self.mass_c <= 0:
            raise ValidationError(f"mass {self.mass_c} must be positive")


@dataclass(frozen=True)
class KernelTable:
    """Dipolar multiplier tabulated on a grid's frequency set."""

    grid: GridSpec
    multiplier: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.multiplier, dtype=np.float64)
        if m.shape != self.grid.shape:
            raise ValidationError("kernel table shape does not match grid")
        eps = 1e-14
        if m.min() < KHAT_MIN - eps or m.max() > KHAT_MAX + eps:
            raise ValidationError("kernel table entry outside the admissible range")
        if m[0, 0, 0] != 0.0:
            raise ValidationError("kernel table must vanish at zero frequency")
        object.__setattr__(self, "multiplier", m)


def dipole_fourier(xi) -> float:
    """Dipolar multiplier at a single frequency; 0 at the origin by convention."""
    x1, x2, x3 = (float(v) for v in xi)
    denom = x1 * x1 + x2 * x2 + x3 * x3
    if denom == 0.0:
        return 0.0
    return (4.0 * np.pi / 3.0) * (2.0 * x3 * x3 - x1 * x1 - x2 * x2) / denom


def build_kernel_table(grid: GridSpec) -> KernelTable:
    """Tabulate the multiplier on every grid frequency (full set, Nyquist kept)."""
    f1, f2, f3 = grid.axis_freqs
    sq1 = f1[:, None, None] ** 2
    sq2 = f2[None, :, None] ** 2
    sq3 = f3[None, None, :] ** 2
    denom = sq1 + sq2 + sq3
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = (4.0 * np.pi / 3.0) * (2.0 * sq3 - sq1 - sq2) / denom
    mult[0, 0, 0] = 0.0
    return KernelTable(grid, mult)


def xi_constant(lambda1: float, lambda2: float) -> float:
    """Uniform bound on |lambda1 + lambda2 K_hat(xi)|, normalized by (2 pi)^3.

    The bound is attained at the multiplier's extreme values, making the
    quartic-norm estimate of the interaction term sharp.
    """
    return max(
        abs(lambda1 + lambda2 * KHAT_MIN), abs(lambda1 + lambda2 * KHAT_MAX)
    ) / (2.0 * np.pi) ** 3
