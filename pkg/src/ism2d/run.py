"""Run orchestration: initial conditions, the time loop, CSV and snapshots.

A run samples diagnostics and writes snapshots at step 0, every configured
number of steps, and at the final step.  On a non-finite state the run stops,
keeps all outputs written so far (snapshot writes are atomic), and reports
the last finite time: the desk-scale analogue of detecting a first blow-up
time from the monitored quantities.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, SimConfig
from .diagnostics import DiagnosticsRecord, gronwall_check, make_record, GronwallReport
from .domain import State, make_grid
from .dynamics import BlowupError, cfl_dt, step_rk4
from .equilibria import EadyParams, eady_state
from .initial import random_smooth
from .snapshot import read_snapshot, write_snapshot

DIAG_HEADER = ("t,h,casimir_q1,casimir_q2,E_hs,"
               "sup_grad_uS,sup_grad_uT,sup_grad_theta,bkm_integral")

STATUS_OK = 0
STATUS_CONFIG = 2
STATUS_NUMERIC = 3
STATUS_FORMAT = 4


def _fmt(v: float) -> str:
    return format(v, ".17g")


def record_to_csv_row(r: DiagnosticsRecord) -> str:
    cas = dict(r.casimir)
    return ",".join(_fmt(v) for v in (
        r.t, r.energy_h, cas.get(1, 0.0), cas.get(2, 0.0), r.E_hs,
        r.sup_grad_uS, r.sup_grad_uT, r.sup_grad_theta, r.bkm_integral))


def build_initial_state(cfg: SimConfig) -> State:
    grid = make_grid(cfg.nx, cfg.nz, cfg.Lx, cfg.Lz)
    ic = cfg.initial_condition
    if ic.kind == "eady":
        G = None
        if ic.eady_gpoly:
            coeffs = ic.eady_gpoly

            def G(z, _c=coeffs):
                out = np.zeros_like(z)
                for k, c in enumerate(_c):
                    out = out + c * z**k
                return out

        return eady_state(grid, cfg.constants, EadyParams(ic.eady_C, G))
    if ic.kind == "random_smooth":
        return random_smooth(grid, ic.seed, ic.amplitude, ic.modes, cfg.constants)
    if ic.kind == "file":
        state = read_snapshot(ic.path)
        if state.grid != grid:
            raise ConfigError(
                f"snapshot grid {state.grid.nx}x{state.grid.nz} does not match "
                f"configured {cfg.nx}x{cfg.nz}")
        return state
    raise ConfigError(f"unknown initial condition kind '{ic.kind}'")


@dataclass
class RunResult:
    status: int
    final_t: float
    records: list[DiagnosticsRecord]
    snapshot_paths: list[str]
    csv_path: str
    message: str = ""


def run(cfg: SimConfig, out_dir: str) -> RunResult:
    """Integrate to t_end, writing snapshots and the diagnostics CSV."""
    if cfg.s_order < 3:
        raise ConfigError(
            "run requires s_order >= 3: the blow-up diagnostics need it")
    os.makedirs(out_dir, exist_ok=True)
    state = build_initial_state(cfg)
    csv_path = os.path.join(out_dir, "diagnostics.csv")
    records: list[DiagnosticsRecord] = []
    snaps: list[str] = []
    status = STATUS_OK
    message = ""

    def emit_snapshot(step: int, st: State):
        p = os.path.join(out_dir, f"snap_{step:06d}.ismsnap")
        write_snapshot(p, st)
        snaps.append(p)

    def emit_record(st: State):
        prev = records[-1] if records else None
        records.append(make_record(st, cfg.s_order, prev))

    with open(csv_path, "w") as fh:
        fh.write(DIAG_HEADER + "\n")
        emit_record(state)
        fh.write(record_to_csv_row(records[-1]) + "\n")
        emit_snapshot(0, state)
        step = 0
        last_diag_step = 0
        last_snap_step = 0
        try:
            while state.t < cfg.t_end - 1e-12:
                dt = cfg.dt if cfg.dt is not None else cfl_dt(state, cfg.cfl,
                                                              cfg.dt_max)
                dt = min(dt, cfg.t_end - state.t)
                # a diverging step overflows before detection; keep it quiet
                with np.errstate(over="ignore", invalid="ignore"):
                    state = step_rk4(state, dt)
                step += 1
                done = state.t >= cfg.t_end - 1e-12
                if step - last_diag_step >= cfg.diagnostics_every or done:
                    emit_record(state)
                    fh.write(record_to_csv_row(records[-1]) + "\n")
                    last_diag_step = step
                if step - last_snap_step >= cfg.snapshot_every or done:
                    emit_snapshot(step, state)
                    last_snap_step = step
        except BlowupError as e:
            status = STATUS_NUMERIC
            message = str(e)
            fh.write(f"# aborted: non-finite state; last finite t={_fmt(records[-1].t)}\n")
    return RunResult(status, records[-1].t, records, snaps, csv_path, message)


def diagnose(paths: list[str], s_order: int) -> tuple[list[DiagnosticsRecord], GronwallReport]:
    """Recompute diagnostics from snapshots with increasing t."""
    if s_order < 3:
        raise ConfigError(
            "diagnose requires s_order >= 3: the blow-up diagnostics need it")
    if not paths:
        raise ConfigError("diagnose needs at least one snapshot")
    states = [read_snapshot(p) for p in paths]
    ts = [s.t for s in states]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ConfigError(f"snapshot times must be strictly increasing, got {ts}")
    records: list[DiagnosticsRecord] = []
    for st in states:
        prev = records[-1] if records else None
        records.append(make_record(st, s_order, prev))
    init_grad = records[0].sup_grad_uT + records[0].sup_grad_theta
    gron = gronwall_check(records, init_grad) if len(records) > 1 else \
        gronwall_check(records, init_grad)
    return records, gron


def diagnose_csv(records: list[DiagnosticsRecord], gron: GronwallReport) -> str:
    lines = [DIAG_HEADER]
    lines += [record_to_csv_row(r) for r in records]
    lines.append(f"# gronwall M={_fmt(gron.M)} degenerate={str(gron.degenerate).lower()}")
    return "\n".join(lines) + "\n"
