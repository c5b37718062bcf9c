"""Plain-text run configuration: key=value lines, # comments.

Required keys: nx, nz, Lx, Lz, t_end, initial_condition.
Time stepping: exactly one of dt (fixed) or cfl (adaptive, default 0.5 when
neither is given); dt_max caps the adaptive step.
Initial conditions:
    eady(C)                      exact steady shear, amplitude C
    eady(C, poly=c0:c1:c2...)    adds G(z) = sum c_k z^k to theta_S
    random_smooth(seed, amplitude, modes)
    file(path)                   restart from a snapshot
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .domain import Constants


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class InitialCondition:
    kind: str                      # "eady" | "random_smooth" | "file"
    eady_C: float = 1.0
    eady_gpoly: tuple[float, ...] = ()
    seed: int = 0
    amplitude: float = 0.1
    modes: int = 3
    path: str = ""


@dataclass(frozen=True)
class SimConfig:
    nx: int
    nz: int
    Lx: float
    Lz: float
    t_end: float
    initial_condition: InitialCondition
    dt: Optional[float] = None
    cfl: Optional[float] = 0.5
    dt_max: float = 0.05
    s_order: int = 3
    snapshot_every: int = 10
    diagnostics_every: int = 10
    constants: Constants = field(default_factory=Constants)


_KEYS = {"nx", "nz", "Lx", "Lz", "dt", "cfl", "dt_max", "t_end", "s_order",
         "snapshot_every", "diagnostics_every", "initial_condition",
         "f", "s", "g", "theta0"}

_REQUIRED = {"nx", "nz", "Lx", "Lz", "t_end", "initial_condition"}

_IC_RE = re.compile(r"^(\w+)\((.*)\)$")


def _parse_ic(text: str, lineno: int) -> InitialCondition:
    m = _IC_RE.match(text.strip())
    if not m:
        raise ConfigError(f"line {lineno}: malformed initial_condition '{text}'")
    kind, argstr = m.group(1), m.group(2)
    args = [a.strip() for a in argstr.split(",")] if argstr.strip() else []
    try:
        if kind == "eady":
            if len(args) == 1:
                return InitialCondition("eady", eady_C=float(args[0]))
            if len(args) == 2 and args[1].startswith("poly="):
                coeffs = tuple(float(c) for c in args[1][5:].split(":"))
                return InitialCondition("eady", eady_C=float(args[0]),
                                        eady_gpoly=coeffs)
            raise ValueError("expected eady(C) or eady(C, poly=c0:c1:...)")
        if kind == "random_smooth":
            if len(args) != 3:
                raise ValueError("expected random_smooth(seed, amplitude, modes)")
            return InitialCondition("random_smooth", seed=int(args[0]),
                                    amplitude=float(args[1]), modes=int(args[2]))
        if kind == "file":
            if len(args) != 1 or not args[0]:
                raise ValueError("expected file(path)")
            return InitialCondition("file", path=args[0])
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"line {lineno}: bad initial_condition: {e}") from e
    raise ConfigError(f"line {lineno}: unknown initial_condition kind '{kind}'")


def parse_config(text: str) -> SimConfig:
    """Parse and validate; every error message carries its line number."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got '{stripped}'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[key] = (value, lineno)

    missing = _REQUIRED - raw.keys()
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(sorted(missing))}")

    def get_num(key, conv, default=None):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return conv(value)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: key '{key}': {e}") from e

    nx = get_num("nx", int)
    nz = get_num("nz", int)
    Lx = get_num("Lx", float)
    Lz = get_num("Lz", float)
    t_end = get_num("t_end", float)
    s_order = get_num("s_order", int, 3)
    snap = get_num("snapshot_every", int, 10)
    diag = get_num("diagnostics_every", int, 10)
    dt = get_num("dt", float)
    cfl = get_num("cfl", float)
    dt_max = get_num("dt_max", float, 0.05)
    consts = Constants(get_num("f", float, 1.0), get_num("s", float, 1.0),
                       get_num("g", float, 1.0), get_num("theta0", float, 1.0))
    ic = _parse_ic(*raw["initial_condition"])

    def bad(key, msg):
        lineno = raw[key][1] if key in raw else 0
        raise ConfigError(f"line {lineno}: key '{key}': {msg}")

    if "dt" in raw and "cfl" in raw:
        raise ConfigError(
            f"line {raw['cfl'][1]}: keys 'dt' and 'cfl' are mutually exclusive; "
            "specify exactly one")
    if dt is None and cfl is None:
        cfl = 0.5
    if dt is not None:
        cfl = None
        if dt <= 0:
            bad("dt", "must be positive")
    if cfl is not None and not (0 < cfl <= 1):
        bad("cfl", "must lie in (0, 1]")
    if nx < 9 or nz < 9:
        bad("nx" if nx < 9 else "nz", "grid needs at least 9 nodes per side")
    if Lx <= 0 or Lz <= 0:
        bad("Lx" if Lx <= 0 else "Lz", "must be positive")
    if t_end <= 0:
        bad("t_end", "must be positive")
    if s_order < 0:
        bad("s_order", "must be nonnegative")
    if snap < 1 or diag < 1:
        bad("snapshot_every" if snap < 1 else "diagnostics_every", "must be >= 1")
    if dt_max <= 0:
        bad("dt_max", "must be positive")

    return SimConfig(nx=nx, nz=nz, Lx=Lx, Lz=Lz, t_end=t_end,
                     initial_condition=ic, dt=dt, cfl=cfl, dt_max=dt_max,
                     s_order=s_order, snapshot_every=snap,
                     diagnostics_every=diag, constants=consts)
