"""Grids, fields, state, and quadrature for the vertical-slice solver.

The slice domain is a closed rectangle [0, Lx] x [0, Lz] discretized by a
node-centered grid that includes all four walls.  Scalar samples are stored
row-major with x fastest, matching node (i, j) -> flat index j*nx + i.
Quadrature is the 2D trapezoid rule (wall nodes weighted 1/2, corners 1/4),
which is exact for bilinear fields and second-order accurate otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


class DomainError(ValueError):
    """Invalid grid or field construction."""


@dataclass(frozen=True, eq=True)
class Grid:
    """Node-centered rectangular grid covering the closed slice domain."""

    nx: int
    nz: int
    Lx: float
    Lz: float

    @property
    def dx(self) -> float:
        return self.Lx / (self.nx - 1)

    @property
    def dz(self) -> float:
        return self.Lz / (self.nz - 1)

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape (nz, nx) used for 2D field storage."""
        return (self.nz, self.nx)

    @cached_property
    def x(self) -> np.ndarray:
        v = np.arange(self.nx) * self.dx
        v.flags.writeable = False
        return v

    @cached_property
    def z(self) -> np.ndarray:
        v = np.arange(self.nz) * self.dz
        v.flags.writeable = False
        return v

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Z) coordinate arrays of shape (nz, nx)."""
        X, Z = np.meshgrid(self.x, self.z)
        X.flags.writeable = False
        Z.flags.writeable = False
        return X, Z

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Trapezoid weights per node, shape (nz, nx); sums to Lx*Lz."""
        wx = np.full(self.nx, self.dx)
        wx[0] = wx[-1] = self.dx / 2
        wz = np.full(self.nz, self.dz)
        wz[0] = wz[-1] = self.dz / 2
        w = wz[:, None] * wx[None, :]
        w.flags.writeable = False
        return w


def make_grid(nx: int, nz: int, Lx: float, Lz: float) -> Grid:
    """Build a grid; wall-resolving stencils need at least 9 nodes per side."""
    if nx < 9 or nz < 9:
        raise DomainError(f"grid too small: nx={nx}, nz={nz} (need >= 9 each)")
    if not (Lx > 0 and Lz > 0):
        raise DomainError(f"domain extents must be positive: Lx={Lx}, Lz={Lz}")
    return Grid(int(nx), int(nz), float(Lx), float(Lz))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ScalarField:
    """Real samples on grid nodes.  Immutable after construction."""

    grid: Grid
    data: np.ndarray  # shape (nz, nx)

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.size != self.grid.nx * self.grid.nz:
            raise DomainError(
                f"field size {a.size} does not match grid {self.grid.nx}x{self.grid.nz}"
            )
        object.__setattr__(self, "data", _freeze(a.reshape(self.grid.shape)))

    @property
    def values(self) -> np.ndarray:
        """Flat view, index = j*nx + i (x fastest)."""
        return self.data.reshape(-1)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def at(self, i: int, j: int) -> float:
        return float(self.data[j, i])


@dataclass(frozen=True)
class VectorField:
    """In-slice vector field: x and z components on one shared grid."""

    x_comp: ScalarField
    z_comp: ScalarField

    def __post_init__(self):
        if self.x_comp.grid != self.z_comp.grid:
            raise DomainError("vector field components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.x_comp.grid

    def is_finite(self) -> bool:
        return self.x_comp.is_finite() and self.z_comp.is_finite()


def vector_field(grid: Grid, x_data: np.ndarray, z_data: np.ndarray) -> VectorField:
    return VectorField(ScalarField(grid, x_data), ScalarField(grid, z_data))


@dataclass(frozen=True)
class Constants:
    """Physical constants; the default normalization sets all four to one.

    Mass density is identically one and never stored.
    """

    f: float = 1.0      # Coriolis parameter
    s: float = 1.0      # transverse temperature gradient
    g: float = 1.0      # gravity
    theta0: float = 1.0  # reference temperature

    def is_normalized(self) -> bool:
        return self.f == self.s == self.g == self.theta0 == 1.0

    @property
    def buoyancy(self) -> float:
        """g / theta0, the coefficient of the buoyancy weight gamma_S = (g/theta0) z."""
        return self.g / self.theta0


@dataclass(frozen=True)
class State:
    """Slice velocity, transverse velocity, potential temperature, and time."""

    u_S: VectorField
    u_T: ScalarField
    theta_S: ScalarField
    t: float = 0.0
    constants: Constants = field(default_factory=Constants)

    def __post_init__(self):
        g = self.u_S.grid
        if not (g == self.u_T.grid == self.theta_S.grid):
            raise DomainError("state fields live on different grids")

    @property
    def grid(self) -> Grid:
        return self.u_S.grid

    def is_finite(self) -> bool:
        return self.u_S.is_finite() and self.u_T.is_finite() and self.theta_S.is_finite()

    def replace(self, **kw) -> "State":
        from dataclasses import replace as _replace

        return _replace(self, **kw)


def sample(grid: Grid, fn: Callable[[float, float], float]) -> ScalarField:
    """Evaluate fn(x, z) on every node.  Non-finite output is an error."""
    X, Z = grid.mesh
    vals = np.asarray(fn(X, Z), dtype=np.float64)
    if vals.shape != grid.shape:  # fn not vectorized; fall back to loop
        vals = np.empty(grid.shape)
        for j, zv in enumerate(grid.z):
            for i, xv in enumerate(grid.x):
                vals[j, i] = fn(xv, zv)
    if not np.isfinite(vals).all():
        raise DomainError("sampled function produced non-finite values")
    return ScalarField(grid, vals)


def volume_integral(f: ScalarField) -> float:
    """Trapezoid quadrature over the closed rectangle."""
    return float(np.sum(f.grid.quad_weights * f.data))


def inner_product(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 inner product (trapezoid-weighted)."""
    return float(np.sum(f.grid.quad_weights * f.data * g.data))


def vector_inner_product(u: VectorField, v: VectorField) -> float:
    w = u.grid.quad_weights
    return float(np.sum(w * (u.x_comp.data * v.x_comp.data + u.z_comp.data * v.z_comp.data)))


def l2_norm(u: VectorField) -> float:
    return float(np.sqrt(max(vector_inner_product(u, u), 0.0)))
