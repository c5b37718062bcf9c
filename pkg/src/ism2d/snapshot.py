"""Binary snapshot format, bit-exact round trip.

Layout (little-endian):
    magic    8 bytes  b"ISMSNAP1"
    nx, nz   u32 each
    Lx, Lz, t, f, s, g, theta0   f64 each
    u_Sx, u_Sz, u_T, theta_S     each nx*nz f64, row-major with x fastest

Writes go through a temporary file in the target directory followed by an
atomic rename, so an aborted run never leaves a truncated snapshot.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .domain import Constants, ScalarField, State, VectorField, make_grid

MAGIC = b"ISMSNAP1"
_HEADER = struct.Struct("<II7d")


class SnapshotFormatError(ValueError):
    """Corrupt or mismatched snapshot file."""


def write_snapshot(path: str, state: State) -> None:
    g = state.grid
    c = state.constants
    header = MAGIC + _HEADER.pack(g.nx, g.nz, g.Lx, g.Lz, state.t,
                                  c.f, c.s, c.g, c.theta0)
    payload = b"".join(
        np.ascontiguousarray(arr, dtype="<f8").tobytes()
        for arr in (state.u_S.x_comp.data, state.u_S.z_comp.data,
                    state.u_T.data, state.theta_S.data)
    )
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".snap-", dir=d)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_snapshot(path: str) -> State:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + _HEADER.size:
        raise SnapshotFormatError(f"{path}: file shorter than header")
    if blob[:len(MAGIC)] != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {blob[:8]!r}")
    nx, nz, Lx, Lz, t, f, s, g, theta0 = _HEADER.unpack_from(blob, len(MAGIC))
    try:
        grid = make_grid(nx, nz, Lx, Lz)
    except ValueError as e:
        raise SnapshotFormatError(f"{path}: bad dimensions: {e}") from e
    n = nx * nz
    expected = len(MAGIC) + _HEADER.size + 4 * n * 8
    if len(blob) != expected:
        raise SnapshotFormatError(
            f"{path}: payload length {len(blob)} != expected {expected} "
            f"for nx={nx}, nz={nz}")
    offset = len(MAGIC) + _HEADER.size
    fields = []
    for k in range(4):
        arr = np.frombuffer(blob, dtype="<f8", count=n,
                            offset=offset + k * n * 8).reshape(nz, nx)
        fields.append(arr.astype(np.float64))
    return State(
        VectorField(ScalarField(grid, fields[0]), ScalarField(grid, fields[1])),
        ScalarField(grid, fields[2]),
        ScalarField(grid, fields[3]),
        t,
        Constants(f, s, g, theta0),
    )
