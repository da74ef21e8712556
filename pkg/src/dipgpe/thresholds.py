"""Closed-form mass thresholds and sign conditions for multiplier positivity.

The standing-wave multiplier of a ground state is guaranteed positive for
masses below a threshold c0 built from the interaction bound and a
Gagliardo-Nirenberg constant.  The constant is a configuration input; the
optimal value would require solving a separate variational problem, so any
numeric c0 printed here is conditional on the configured (non-optimal)
constant.  Under either sign condition on (lambda1, lambda2) the
interaction term is never positive and the threshold is infinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCouplings, ValidationError
from .kernel import KHAT_MAX, KHAT_MIN, CouplingParams, xi_constant


@dataclass(frozen=True)
class GNConstants:
    """Gagliardo-Nirenberg constant c1 for the quintic norm, and derived c2.

    c1 bounds |u|_5 <= c1 |grad u|_2^{9/10} |u|_2^{1/10}; the derived
    constant is c2 = (5/9)^{4/5} c1^{-4/5}.
    """

    c1: float = 1.0
    c2: float = field(init=False)

    def __post_init__(self):
        if not np.isfinite(self.c1) or self.c1 <= 0:
            raise ValidationError(f"GN constant {self.c1} must be positive")
        object.__setattr__(self, "c2", (5.0 / 9.0) ** 0.8 * self.c1**-0.8)


def is_unconditional(lambda1: float, lambda2: float) -> bool:
    """True iff lambda1 + lambda2 K_hat(xi) <= 0 for every frequency.

    Equivalent to one of the endpoint sign conditions; in this regime the
    interaction functional is nonpositive on every field and the mass
    threshold is infinite.
    """
    if lambda2 > 0:
        return lambda1 + lambda2 * KHAT_MAX <= 0
    return lambda1 + lambda2 * KHAT_MIN <= 0


def c0_threshold(p: CouplingParams, g: GNConstants = GNConstants()) -> float:
    """Mass threshold below which the ground-state multiplier is positive.

    Returns min(4 l3^2 / (25 Xi^2), c2^5 / (243 l3^4 Xi^5)); infinite when
    the sign conditions hold or the interaction bound vanishes.
    """
    if p.lambda3 >= 0:
        raise InvalidCouplings(f"quintic coupling {p.lambda3} must be negative")
    if is_unconditional(p.lambda1, p.lambda2):
        return np.inf
    xi = xi_constant(p.lambda1, p.lambda2)
    if xi == 0.0:
        return np.inf
    return min(_mass_branch(p.lambda3, xi), _gn_branch(p.lambda3, xi, g))


def _mass_branch(lambda3: float, xi: float) -> float:
    return 4.0 * lambda3**2 / (25.0 * xi**2)


def _gn_branch(lambda3: float, xi: float, g: GNConstants) -> float:
    return g.c2**5 / (243.0 * lambda3**4 * xi**5)


def threshold_summary(p: CouplingParams, g: GNConstants = GNConstants()) -> dict:
    """All threshold quantities in one report (CLI payload)."""
    if p.lambda3 >= 0:
        raise InvalidCouplings(f"quintic coupling {p.lambda3} must be negative")
    xi = xi_constant(p.lambda1, p.lambda2)
    unconditional = is_unconditional(p.lambda1, p.lambda2)
    if xi == 0.0:
        branches = (np.inf, np.inf)
    else:
        branches = (_mass_branch(p.lambda3, xi), _gn_branch(p.lambda3, xi, g))
    c0 = np.inf if unconditional else min(branches)
    return {
        "xi": xi,
        "unconditional": unconditional,
        "c0_mass_branch": branches[0],
        "c0_gn_branch": branches[1],
        "c0": c0,
        "gn_c1": g.c1,
        "gn_c1_warning": (
            "gn_c1 is a NON-OPTIMAL configuration constant; "
            "c0 values are conditional on it"
        ),
    }


def quintic_gn_ratio(norm5: float, grad_sq: float, mass: float, g: GNConstants) -> float:
    """Ratio |u|_5 / (c1 A^{9/20} D^{1/20}); values above 1 flag a
    miscalibrated constant (reported, never asserted)."""
    if grad_sq <= 0 or mass <= 0:
        return 0.0
    return norm5 / (g.c1 * grad_sq**0.45 * mass**0.05)
