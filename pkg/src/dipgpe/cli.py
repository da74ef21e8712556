"""Command-line surface tying the modules together.

Subcommands: solve, fiber, dynamics, thresholds, verify.  Exit codes:
0 success, 1 non-convergence (or failed verification), 2 input error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as dio
from .dynamics import PropagationConfig, conservation_report, split_step_evolve, standing_wave_error
from .errors import DipgpeError
from .fibering import FiberTriple, mpg_path, solve_tstar
from .functionals import chemical_potential, compute_diagnostics, el_residual
from .kernel import CouplingParams, build_kernel_table
from .solve import minimize_ground_state, verify_field, verify_ground_state
from .thresholds import GNConstants, threshold_summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipgpe",
        description="Mountain-pass ground states of the dipolar cubic-quartic "
        "Gross-Pitaevskii energy on a periodic box",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the ground-state solver from a config file")
    ps.add_argument("config", help="path to a key=value config file")
    ps.add_argument("--report-out", help="write the JSON run report here (stdout always)")
    ps.add_argument("--field-out", help="write the converged field (GPEF binary) here")
    ps.add_argument("--log-out", help="write the iteration log (delimited text) here")
    for key in ("lambda1", "lambda2", "lambda3", "mass", "step_size", "tol_residual",
                "tol_virial", "init_sigma", "init_anisotropy", "gn_c1"):
        ps.add_argument(f"--{key.replace('_', '-')}", type=float, default=None,
                        help=f"override config key {key}")
    ps.add_argument("--max-iters", type=int, default=None, help="override config key max_iters")
    ps.add_argument("--seed", type=int, default=None, help="override config key seed")
    ps.add_argument("--grid-n", type=int, nargs=3, default=None, metavar=("N1", "N2", "N3"),
                    help="override config key grid_n")
    ps.add_argument("--box-l", type=float, nargs=3, default=None, metavar=("L1", "L2", "L3"),
                    help="override config key box_l")

    pf = sub.add_parser("fiber", help="virial root and path table of a coefficient triple")
    pf.add_argument("--a", type=float, required=True, help="kinetic coefficient (> 0)")
    pf.add_argument("--b", type=float, required=True, help="quartic coefficient")
    pf.add_argument("--c", type=float, required=True, help="quintic coefficient (< 0)")
    pf.add_argument("--theta1", type=float, default=None, help="left path endpoint (default t*/10)")
    pf.add_argument("--theta2", type=float, default=None,
                    help="right path endpoint (default: first dyadic point with negative energy)")
    pf.add_argument("--samples", type=int, default=101, help="path sample count")
    pf.add_argument("--table-out", help="write the (t, energy, virial) table here")

    pd = sub.add_parser("dynamics", help="split-step propagation of a stored field")
    pd.add_argument("--field", required=True, help="input GPEF field file")
    pd.add_argument("--dt", type=float, required=True, help="time step")
    pd.add_argument("--steps", type=int, required=True, help="number of steps")
    pd.add_argument("--lambda1", type=float, default=0.0)
    pd.add_argument("--lambda2", type=float, default=0.0)
    pd.add_argument("--lambda3", type=float, default=0.0)
    pd.add_argument("--field-out", help="write the propagated field here")
    pd.add_argument("--reference", help="reference field for the standing-wave error")
    pd.add_argument("--beta", type=float, default=None,
                    help="standing-wave frequency for the reference comparison")

    pt = sub.add_parser("thresholds", help="interaction bound, mass threshold, sign conditions")
    pt.add_argument("--lambda1", type=float, required=True)
    pt.add_argument("--lambda2", type=float, required=True)
    pt.add_argument("--lambda3", type=float, required=True)
    pt.add_argument("--gn-c1", type=float, default=1.0)

    pv = sub.add_parser("verify", help="ground-state property checks on a stored field")
    pv.add_argument("--field", required=True, help="GPEF field file to check")
    pv.add_argument("--lambda1", type=float, required=True)
    pv.add_argument("--lambda2", type=float, required=True)
    pv.add_argument("--lambda3", type=float, required=True)
    pv.add_argument("--tol-residual", type=float, default=1e-5)
    pv.add_argument("--tol-virial", type=float, default=1e-6)
    pv.add_argument("--gn-c1", type=float, default=1.0)

    return parser


def _cmd_solve(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    overrides = {
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "lambda3": args.lambda3,
        "mass": args.mass,
        "grid_n": tuple(args.grid_n) if args.grid_n else None,
        "box_l": tuple(args.box_l) if args.box_l else None,
        "step_size": args.step_size,
        "tol_residual": args.tol_residual,
        "tol_virial": args.tol_virial,
        "max_iters": args.max_iters,
        "seed": args.seed,
        "init_sigma": args.init_sigma,
        "init_anisotropy": args.init_anisotropy,
        "gn_c1": args.gn_c1,
    }
    cfg = dio.parse_config(text, overrides=overrides)
    table = build_kernel_table(cfg.grid)
    result = minimize_ground_state(cfg, table)
    verification = None
    if result.converged:
        verification = verify_ground_state(
            result, table, cfg.couplings,
            tol_virial=cfg.tol_virial, gn=GNConstants(cfg.gn_c1),
        )
    report = dio.build_run_report(cfg, result, verification)
    print(dio.report_to_json(report))
    if args.report_out:
        with open(args.report_out, "w", encoding="utf-8") as fh:
            fh.write(dio.report_to_json(report) + "\n")
    if args.field_out:
        dio.write_field(result.field, args.field_out)
    if args.log_out:
        with open(args.log_out, "w", encoding="utf-8") as fh:
            dio.write_history(result.history, fh)
    return 0 if result.converged else 1


def _cmd_fiber(args) -> int:
    triple = FiberTriple(args.a, args.b, args.c)
    res = solve_tstar(triple)
    theta1 = args.theta1 if args.theta1 is not None else res.t_star / 10.0
    theta2 = args.theta2
    if theta2 is None:
        theta2 = 2.0 * res.t_star
        from .fibering import fiber_energy

        while fiber_energy(triple, theta2) >= 0:
            theta2 *= 2.0
    rows = mpg_path(triple, theta1, theta2, args.samples)
    payload = {
        "t_star": res.t_star,
        "energy_at_star": res.energy_at_star,
        "curvature": res.curvature,
        "theta1": theta1,
        "theta2": theta2,
        "samples": args.samples,
    }
    print(dio.report_to_json(payload))
    if args.table_out:
        with open(args.table_out, "w", encoding="utf-8") as fh:
            dio.write_fiber_table(rows, fh)
    return 0


def _cmd_dynamics(args) -> int:
    psi0 = dio.read_field(args.field)
    mass = float(
        psi0.grid.cell_volume * np.sum(psi0.values.real**2 + psi0.values.imag**2)
    )
    couplings = CouplingParams(args.lambda1, args.lambda2, args.lambda3, mass)
    cfg = PropagationConfig(dt=args.dt, steps=args.steps, couplings=couplings)
    table = build_kernel_table(psi0.grid)
    psiT = split_step_evolve(psi0, cfg, table)
    drift = conservation_report(psi0, psiT, table, couplings)
    payload = {
        "dt": args.dt,
        "steps": args.steps,
        "total_time": args.dt * args.steps,
        "mass_drift": drift.mass_drift,
        "energy_drift": drift.energy_drift,
    }
    if args.reference:
        if args.beta is None:
            raise DipgpeError("--reference requires --beta")
        ref = dio.read_field(args.reference)
        payload["standing_wave_error"] = standing_wave_error(
            psiT, ref, args.beta, args.dt * args.steps
        )
    print(dio.report_to_json(payload))
    if args.field_out:
        dio.write_field(psiT, args.field_out)
    return 0


def _cmd_thresholds(args) -> int:
    couplings = CouplingParams(args.lambda1, args.lambda2, args.lambda3, 1.0)
    payload = threshold_summary(couplings, GNConstants(args.gn_c1))
    print(dio.report_to_json(payload))
    return 0


def _cmd_verify(args) -> int:
    u = dio.read_field(args.field)
    mass = float(u.grid.cell_volume * np.sum(u.values.real**2 + u.values.imag**2))
    couplings = CouplingParams(args.lambda1, args.lambda2, args.lambda3, mass)
    table = build_kernel_table(u.grid)
    diag = compute_diagnostics(u, table, couplings)
    beta = chemical_potential(diag)
    residual = el_residual(u, beta, table, couplings)
    report = verify_field(
        u, diag, couplings,
        tol_virial=args.tol_virial, gn=GNConstants(args.gn_c1),
    )
    payload = report.as_dict()
    payload["residual"] = residual
    payload["residual_ok"] = residual <= args.tol_residual
    payload["diagnostics"] = diag.as_dict()
    print(dio.report_to_json(payload))
    return 0 if (report.all_passed and residual <= args.tol_residual) else 1


_HANDLERS = {
    "solve": _cmd_solve,
    "fiber": _cmd_fiber,
    "dynamics": _cmd_dynamics,
    "thresholds": _cmd_thresholds,
    "verify": _cmd_verify,
}


def run_command(argv) -> int:
    """Parse and dispatch one command line; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _HANDLERS[args.command](args)
    except (DipgpeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
