"""Discrete differential operators, fast Poisson solvers, and the Leray projector.

Differentiation uses second-order centered stencils at interior nodes and
second-order one-sided stencils on the walls, applied dimension-by-dimension.

Both Poisson solvers are diagonalized exactly by trigonometric transforms:

* Dirichlet (streamfunction inversion): the compact 5-point Laplacian on
  interior nodes, diagonal in the DST-I basis with eigenvalues
  2(cos(k pi/(n-1)) - 1)/h^2 per direction.
* Neumann (pressure): the compact 5-point Laplacian closed with ghost nodes
  (central difference across the wall equals the boundary datum), diagonal in
  the DCT-I basis.  The compatibility defect (volume integral of the source
  minus the boundary integral of the flux) is subtracted uniformly before the
  solve and reported; the solution is gauged to zero trapezoid mean.

The Leray projector is the exact orthogonal projection, in the trapezoid
inner product, onto velocity fields expanded in mixed sine/cosine bases that
vanish normal to every wall:

    u_x = sum a_{kl} sin(k pi x/Lx) cos(l pi z/Lz)
    u_z = sum b_{kl} cos(k pi x/Lx) sin(l pi z/Lz)

These tensor modes are exactly orthogonal under trapezoid weights, and the
centered difference acts diagonally on them with modified wavenumber
kappa_k = sin(k pi/(n-1))/h.  Projecting each mode pair against the discrete
gradient direction (kappa_x, kappa_z) therefore yields, to round-off:
idempotence, orthogonality of the two parts, norm non-expansion, zero
centered divergence at every interior node, and exactly zero wall-normal
velocity.  Consistency with the continuum projector is second order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .domain import Grid, ScalarField, VectorField, DomainError


class SolverError(ValueError):
    """Poisson solver received invalid (non-finite) input."""


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def _diff(a: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second-order first derivative along an axis; one-sided at the ends."""
    out = np.empty_like(a)
    am = np.moveaxis(a, axis, 0)
    om = np.moveaxis(out, axis, 0)
    om[1:-1] = (am[2:] - am[:-2]) / (2 * h)
    om[0] = (-3 * am[0] + 4 * am[1] - am[2]) / (2 * h)
    om[-1] = (3 * am[-1] - 4 * am[-2] + am[-3]) / (2 * h)
    return out


def ddx(f: ScalarField) -> np.ndarray:
    return _diff(f.data, f.grid.dx, axis=1)


def ddz(f: ScalarField) -> np.ndarray:
    return _diff(f.data, f.grid.dz, axis=0)


def grad(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField(ScalarField(g, ddx(f)), ScalarField(g, ddz(f)))


def div(u: VectorField) -> ScalarField:
    g = u.grid
    return ScalarField(g, ddx(u.x_comp) + ddz(u.z_comp))


def curl2d(u: VectorField) -> ScalarField:
    """Slice vorticity, convention omega = d(u_z)/dx - d(u_x)/dz."""
    g = u.grid
    return ScalarField(g, ddx(u.z_comp) - ddz(u.x_comp))


def perp_grad(psi: ScalarField) -> VectorField:
    """Skew gradient (-d psi/dz, d psi/dx); wall-tangent when psi = 0 on walls."""
    g = psi.grid
    return VectorField(ScalarField(g, -ddz(psi)), ScalarField(g, ddx(psi)))


def advect(u: VectorField, f: ScalarField) -> ScalarField:
    """Pointwise u . grad f with the same stencil family as grad."""
    g = f.grid
    if u.grid != g:
        raise DomainError("advect: velocity and scalar live on different grids")
    return ScalarField(g, u.x_comp.data * ddx(f) + u.z_comp.data * ddz(f))


# ---------------------------------------------------------------------------
# Poisson solvers
# ---------------------------------------------------------------------------

class PoissonDirichletSolver:
    """Fast solver for the 5-point Laplacian with psi = 0 on all walls."""

    def __init__(self, grid: Grid):
        self.grid = grid
        kx = np.arange(1, grid.nx - 1)
        kz = np.arange(1, grid.nz - 1)
        lamx = 2.0 * (np.cos(kx * np.pi / (grid.nx - 1)) - 1.0) / grid.dx**2
        lamz = 2.0 * (np.cos(kz * np.pi / (grid.nz - 1)) - 1.0) / grid.dz**2
        self._lam = lamz[:, None] + lamx[None, :]

    def solve(self, rhs: ScalarField) -> ScalarField:
        """Return psi with psi = 0 on walls; rhs values on walls are ignored."""
        if not rhs.is_finite():
            raise SolverError("Dirichlet solve: non-finite right-hand side")
        fh = sfft.dstn(rhs.data[1:-1, 1:-1], type=1)
        psi = np.zeros(self.grid.shape)
        psi[1:-1, 1:-1] = sfft.idstn(fh / self._lam, type=1)
        return ScalarField(self.grid, psi)


@dataclass(frozen=True)
class BoundaryData:
    """Outward normal derivative on the four wall segments.

    x_lo/x_hi: along x = 0 and x = Lx (length nz);
    z_lo/z_hi: along z = 0 and z = Lz (length nx).
    """

    x_lo: np.ndarray
    x_hi: np.ndarray
    z_lo: np.ndarray
    z_hi: np.ndarray

    @staticmethod
    def zero(grid: Grid) -> "BoundaryData":
        return BoundaryData(np.zeros(grid.nz), np.zeros(grid.nz),
                            np.zeros(grid.nx), np.zeros(grid.nx))

    @staticmethod
    def normal_flux(w: VectorField) -> "BoundaryData":
        """w . n on each wall (outward normal)."""
        wx, wz = w.x_comp.data, w.z_comp.data
        return BoundaryData(-wx[:, 0].copy(), wx[:, -1].copy(),
                            -wz[0, :].copy(), wz[-1, :].copy())


class PoissonNeumannSolver:
    """Fast solver for the ghost-node Neumann problem, zero-mean gauge."""

    def __init__(self, grid: Grid):
        self.grid = grid
        lamx = 2.0 * (np.cos(np.arange(grid.nx) * np.pi / (grid.nx - 1)) - 1.0) / grid.dx**2
        lamz = 2.0 * (np.cos(np.arange(grid.nz) * np.pi / (grid.nz - 1)) - 1.0) / grid.dz**2
        lam = lamz[:, None] + lamx[None, :]
        lam[0, 0] = 1.0  # constant mode handled by gauge
        self._lam = lam

    def compatibility_defect(self, rhs: ScalarField, g: BoundaryData) -> float:
        """Volume integral of rhs minus boundary integral of g (trapezoid)."""
        gr = self.grid
        wx = np.full(gr.nx, gr.dx); wx[0] = wx[-1] = gr.dx / 2
        wz = np.full(gr.nz, gr.dz); wz[0] = wz[-1] = gr.dz / 2
        vol = float(np.sum(gr.quad_weights * rhs.data))
        bnd = float(np.sum(wz * g.x_lo) + np.sum(wz * g.x_hi)
                    + np.sum(wx * g.z_lo) + np.sum(wx * g.z_hi))
        return vol - bnd

    def solve_with_defect(self, rhs: ScalarField, g: BoundaryData) -> tuple[ScalarField, float]:
        gr = self.grid
        if not rhs.is_finite():
            raise SolverError("Neumann solve: non-finite right-hand side")
        for arr in (g.x_lo, g.x_hi, g.z_lo, g.z_hi):
            if not np.isfinite(arr).all():
                raise SolverError("Neumann solve: non-finite boundary data")
        # fold ghost-node boundary conditions into the right-hand side
        f = rhs.data.copy()
        f[:, 0] -= 2.0 * g.x_lo / gr.dx
        f[:, -1] -= 2.0 * g.x_hi / gr.dx
        f[0, :] -= 2.0 * g.z_lo / gr.dz
        f[-1, :] -= 2.0 * g.z_hi / gr.dz
        defect = self.compatibility_defect(rhs, g)
        f -= defect / (gr.Lx * gr.Lz)
        fh = sfft.dctn(f, type=1)
        fh[0, 0] = 0.0  # zero trapezoid mean
        p = sfft.idctn(fh / self._lam, type=1)
        return ScalarField(gr, p), defect

    def solve(self, rhs: ScalarField, g: BoundaryData) -> ScalarField:
        return self.solve_with_defect(rhs, g)[0]


# ---------------------------------------------------------------------------
# Leray projector
# ---------------------------------------------------------------------------

class LerayProjector:
    """Orthogonal projection onto discretely solenoidal, wall-tangent fields."""

    def __init__(self, grid: Grid):
        self.grid = grid
        nx, nz, Lx, Lz = grid.nx, grid.nz, grid.Lx, grid.Lz
        self._kx = np.sin(np.arange(1, nx - 1) * np.pi / (nx - 1)) / grid.dx
        self._kz = np.sin(np.arange(1, nz - 1) * np.pi / (nz - 1)) / grid.dz
        # basis norms under trapezoid weights: ||sin_k||^2 = L/2 everywhere,
        # ||cos_l||^2 = L/2 except the two end modes (l = 0, n-1) with norm L
        cwx = np.full(nx, Lx / 2); cwx[0] = cwx[-1] = Lx
        cwz = np.full(nz, Lz / 2); cwz[0] = cwz[-1] = Lz
        self._Na = (Lx / 2) * cwz[None, :]   # a-mode norms, broadcast over (nx-2, nz)
        self._Nb = cwx[:, None] * (Lz / 2)   # b-mode norms, broadcast over (nx, nz-2)
        # coefficient scalings between scipy's raw DCT-I output and true coefficients
        sz = np.full(nz, float(nz - 1)); sz[0] = sz[-1] = 2.0 * (nz - 1)
        sx = np.full(nx, float(nx - 1)); sx[0] = sx[-1] = 2.0 * (nx - 1)
        self._sz, self._sx = sz, sx

    # -- transforms between fields and true basis coefficients --------------

    def _ux_coeff(self, fx: np.ndarray) -> np.ndarray:
        """(nz, nx) field, zero-normal wall columns ignored -> coeffs (nx-2, nz)."""
        a = sfft.dst(fx[:, 1:-1], type=1, axis=1) / (self.grid.nx - 1)
        a = sfft.dct(a, type=1, axis=0) / self._sz[:, None]
        return a.T

    def _ux_field(self, a: np.ndarray) -> np.ndarray:
        g = sfft.idct(a.T * self._sz[:, None], type=1, axis=0)
        f = np.zeros(self.grid.shape)
        f[:, 1:-1] = sfft.idst(g * (self.grid.nx - 1), type=1, axis=1)
        return f

    def _uz_coeff(self, fz: np.ndarray) -> np.ndarray:
        b = sfft.dst(fz[1:-1, :], type=1, axis=0) / (self.grid.nz - 1)
        b = sfft.dct(b, type=1, axis=1) / self._sx[None, :]
        return b.T

    def _uz_field(self, b: np.ndarray) -> np.ndarray:
        g = sfft.idct(b.T * self._sx[None, :], type=1, axis=1)
        f = np.zeros(self.grid.shape)
        f[1:-1, :] = sfft.idst(g * (self.grid.nz - 1), type=1, axis=0)
        return f

    # -- projection ----------------------------------------------------------

    def project_arrays(self, wx: np.ndarray, wz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = self._ux_coeff(wx)          # (nx-2, nz)
        b = self._uz_coeff(wz)          # (nx, nz-2)
        kx = self._kx[:, None]
        kz = self._kz[None, :]
        aj = a[:, 1:-1]
        bj = b[1:-1, :]
        Na = self._Na[:, 1:-1]
        Nb = self._Nb[1:-1, :]
        # remove the component along the discrete gradient direction (kx, kz)
        t = (aj * kx * Na + bj * kz * Nb) / (kx**2 * Na + kz**2 * Nb)
        a2 = np.zeros_like(a)
        b2 = np.zeros_like(b)
        a2[:, 1:-1] = aj - t * kx
        b2[1:-1, :] = bj - t * kz
        # modes present in only one component are pure gradients: drop them
        return self._ux_field(a2), self._uz_field(b2)

    def project(self, w: VectorField) -> tuple[VectorField, VectorField]:
        """Decompose w = u + grad_p with u solenoidal and wall-tangent.

        Returns (u, grad_p) where grad_p = w - u is the discrete-gradient
        complement, orthogonal to u in the trapezoid inner product.
        """
        if not w.is_finite():
            raise SolverError("Leray projection: non-finite input field")
        gr = self.grid
        ux, uz = self.project_arrays(w.x_comp.data, w.z_comp.data)
        u = VectorField(ScalarField(gr, ux), ScalarField(gr, uz))
        gp = VectorField(ScalarField(gr, w.x_comp.data - ux),
                         ScalarField(gr, w.z_comp.data - uz))
        return u, gp


# ---------------------------------------------------------------------------
# per-grid solver caches and functional wrappers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def dirichlet_solver(grid: Grid) -> PoissonDirichletSolver:
    return PoissonDirichletSolver(grid)


@lru_cache(maxsize=64)
def neumann_solver(grid: Grid) -> PoissonNeumannSolver:
    return PoissonNeumannSolver(grid)


@lru_cache(maxsize=64)
def leray_projector(grid: Grid) -> LerayProjector:
    return LerayProjector(grid)


def poisson_dirichlet(rhs: ScalarField) -> ScalarField:
    return dirichlet_solver(rhs.grid).solve(rhs)


def poisson_neumann(rhs: ScalarField, g: BoundaryData) -> ScalarField:
    return neumann_solver(rhs.grid).solve(rhs, g)


def leray_project(w: VectorField) -> tuple[VectorField, VectorField]:
    return leray_projector(w.grid).project(w)
