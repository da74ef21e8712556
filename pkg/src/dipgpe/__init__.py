"""Mountain-pass ground states of a dipolar cubic-quartic Gross-Pitaevskii
energy on a periodic box: pseudospectral functionals, fibering-map tools, a
virial-manifold solver, split-step dynamics, and verification utilities."""

from .dynamics import (
    ConservationReport,
    PropagationConfig,
    conservation_report,
    split_step_evolve,
    standing_wave_error,
)
from .errors import (
    BadEndpoints,
    BadMagic,
    DecayViolation,
    DimensionOverflow,
    DipgpeError,
    FieldFormatError,
    GridMismatch,
    InvalidCouplings,
    InvalidTriple,
    NotConvergedInput,
    NotOnManifold,
    NumericalBlowup,
    ParseError,
    TruncatedFile,
    ValidationError,
    VersionMismatch,
    ZeroMass,
)
from .fibering import (
    FiberResult,
    FiberTriple,
    fiber_curvature_at_root,
    fiber_energy,
    fiber_virial,
    mpg_path,
    rescale_to_manifold,
    solve_tstar,
)
from .functionals import (
    Diagnostics,
    chemical_potential,
    compute_diagnostics,
    el_residual,
    energy_gradient,
)
from .grid import (
    Field,
    GridSpec,
    SpectralField,
    forward_transform,
    gradient_norm_sq,
    integrate_density,
    inverse_transform,
    make_grid,
    resample_scaled,
)
from .io import (
    build_run_report,
    format_config,
    parse_config,
    read_field,
    report_to_json,
    write_field,
)
from .kernel import (
    CouplingParams,
    KernelTable,
    build_kernel_table,
    dipole_fourier,
    xi_constant,
)
from .solve import (
    IterationRecord,
    SolverConfig,
    SolverResult,
    VerificationReport,
    gamma_curve,
    init_field,
    minimize_ground_state,
    multi_seed_ground_state,
    verify_field,
    verify_ground_state,
)
from .thresholds import GNConstants, c0_threshold, is_unconditional, threshold_summary

__version__ = "0.1.0"
