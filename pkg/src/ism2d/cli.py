"""Command-line interface.

Subcommands:
    run <config> [--out-dir D]          integrate, write snapshots + CSV
    diagnose <snap...> --s-order N      recompute diagnostics from snapshots
    equilibrium <config>                steady residuals + critical-point report
    stability <snapshot> [--out CSV]    curvature field and stability verdicts

Exit status: 0 success, 2 configuration error, 3 numerical abort
(non-finite state), 4 snapshot format error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, parse_config
from .equilibria import (
    eady_phi_prime,
    ec_conditions_residual,
    formal_stability_field,
    steady_residual,
)
from .run import (
    STATUS_CONFIG,
    STATUS_FORMAT,
    STATUS_NUMERIC,
    STATUS_OK,
    build_initial_state,
    diagnose,
    diagnose_csv,
    run,
)
from .snapshot import SnapshotFormatError, read_snapshot


def _load_config(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    result = run(cfg, args.out_dir)
    print(f"run: t={result.final_t:.6g} records={len(result.records)} "
          f"snapshots={len(result.snapshot_paths)} csv={result.csv_path}")
    if result.status == STATUS_NUMERIC:
        print(f"run aborted: {result.message}", file=sys.stderr)
    return result.status


def _cmd_diagnose(args) -> int:
    records, gron = diagnose(args.snapshots, args.s_order)
    text = diagnose_csv(records, gron)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return STATUS_OK


def _cmd_equilibrium(args) -> int:
    cfg = _load_config(args.config)
    state = build_initial_state(cfg)
    r = steady_residual(state)
    print(f"steady_residual: du_S={r[0]:.6e} du_T={r[1]:.6e} dtheta_S={r[2]:.6e}")
    if args.phi_prime == "eady" and cfg.initial_condition.kind == "eady":
        phi_p = eady_phi_prime(cfg.initial_condition.eady_C)
        label = "eady-quadratic"
    else:
        def phi_p(q):
            return np.zeros_like(q)
        label = "zero"
    rep = ec_conditions_residual(state, phi_p)
    print(f"ec_conditions (phi'={label}): u_S={rep.r_u_S:.6e} "
          f"u_T={rep.r_u_T:.6e} gamma={rep.r_gamma:.6e} "
          f"a0_spread={rep.a0_spread:.6e}")
    return STATUS_OK


def _cmd_stability(args) -> int:
    state = read_snapshot(args.snapshot)
    rep = formal_stability_field(state)
    if args.out:
        g = state.grid
        X, Z = g.mesh
        with open(args.out, "w") as fh:
            fh.write("x,z,phi_pp,degenerate\n")
            for j in range(g.nz):
                for i in range(g.nx):
                    v = rep.phi_pp.data[j, i]
                    fh.write(f"{X[j, i]:.17g},{Z[j, i]:.17g},"
                             f"{v:.17g},{int(rep.degenerate_mask[j, i])}\n")
    print(f"stability: formal={rep.formal_verdict} "
          f"nonlinear={rep.nonlinear_verdict} "
          f"lambda1={rep.lambda1:.6g} lambda2={rep.lambda2:.6g} "
          f"masked_fraction={rep.masked_fraction:.4f}")
    return STATUS_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ism2d",
                                     description="Vertical-slice flow solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configuration")
    p.add_argument("config")
    p.add_argument("--out-dir", default="out")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("diagnose", help="diagnostics from snapshots")
    p.add_argument("snapshots", nargs="+")
    p.add_argument("--s-order", type=int, default=3)
    p.add_argument("--out", default="")
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("equilibrium", help="steady-state and critical-point report")
    p.add_argument("config")
    p.add_argument("--phi-prime", choices=["zero", "eady"], default="zero")
    p.set_defaults(fn=_cmd_equilibrium)

    p = sub.add_parser("stability", help="stability report for a snapshot")
    p.add_argument("snapshot")
    p.add_argument("--out", default="")
    p.set_defaults(fn=_cmd_stability)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return STATUS_CONFIG
    except SnapshotFormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return STATUS_FORMAT
    except FloatingPointError as e:  # includes BlowupError
        print(f"numerical error: {e}", file=sys.stderr)
        return STATUS_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
