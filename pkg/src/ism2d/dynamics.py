"""Right-hand sides of the slice system, pressure diagnostic, and time stepping.

Primitive form (method of lines on the projected system):

    d(u_S)/dt    = P(-u_S.grad u_S + f u_T x_hat + (g/theta0) theta_S z_hat)
    d(u_T)/dt    = -u_S.grad u_T - f u_S.x_hat - (g/theta0) s z
    d(theta_S)/dt = -u_S.grad theta_S - s u_T

with P the Leray projector.  The transverse and temperature equations carry
no pressure coupling.

Vorticity form: omega = curl u_S is advanced with

    d(omega)/dt = -u.grad omega + (g/theta0) dx theta_S - f dz u_T

where u is reconstructed from the streamfunction (Dirichlet inversion of
omega, velocity = skew gradient).  The sign of the dz u_T term is fixed by
requiring the exact sheared steady family to be a fixed point.

Time integration is classical RK4; the combined velocity increment is passed
through the projector once more after the stage combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Constants, Grid, ScalarField, State, VectorField
from .operators import (
    BoundaryData,
    advect,
    curl2d,
    ddx,
    ddz,
    dirichlet_solver,
    leray_projector,
    neumann_solver,
    perp_grad,
)


class BlowupError(FloatingPointError):
    """Time step produced a non-finite state (instability or blow-up)."""


@dataclass(frozen=True)
class Tendency:
    du_S: VectorField
    du_T: ScalarField
    dtheta_S: ScalarField


@dataclass(frozen=True)
class VortState:
    """Vorticity-form state: (omega, u_T, theta_S)."""

    omega: ScalarField
    u_T: ScalarField
    theta_S: ScalarField
    t: float = 0.0
    constants: Constants = field(default_factory=Constants)

    @property
    def grid(self) -> Grid:
        return self.omega.grid

    def is_finite(self) -> bool:
        return self.omega.is_finite() and self.u_T.is_finite() and self.theta_S.is_finite()


def momentum_forcing(state: State) -> VectorField:
    """Unprojected momentum tendency F = -u.grad u + f u_T x_hat + b theta z_hat."""
    g = state.grid
    c = state.constants
    ux, uz = state.u_S.x_comp, state.u_S.z_comp
    fx = -(ux.data * ddx(ux) + uz.data * ddz(ux)) + c.f * state.u_T.data
    fz = -(ux.data * ddx(uz) + uz.data * ddz(uz)) + c.buoyancy * state.theta_S.data
    return VectorField(ScalarField(g, fx), ScalarField(g, fz))


def rhs_primitive(state: State) -> Tendency:
    if not state.is_finite():
        raise BlowupError("non-finite state passed to rhs_primitive")
    g = state.grid
    c = state.constants
    proj = leray_projector(g)
    F = momentum_forcing(state)
    du_x, du_z = proj.project_arrays(F.x_comp.data, F.z_comp.data)
    _, Z = g.mesh
    du_T = (-advect(state.u_S, state.u_T).data
            - c.f * state.u_S.x_comp.data
            - c.buoyancy * c.s * Z)
    dtheta = -advect(state.u_S, state.theta_S).data - c.s * state.u_T.data
    return Tendency(
        VectorField(ScalarField(g, du_x), ScalarField(g, du_z)),
        ScalarField(g, du_T),
        ScalarField(g, dtheta),
    )


def reconstruct_velocity(omega: ScalarField) -> VectorField:
    """Velocity from vorticity: streamfunction inversion plus skew gradient."""
    psi = dirichlet_solver(omega.grid).solve(omega)
    return perp_grad(psi)


def rhs_vorticity(vs: VortState) -> tuple[ScalarField, ScalarField, ScalarField]:
    if not vs.is_finite():
        raise BlowupError("non-finite state passed to rhs_vorticity")
    g = vs.grid
    c = vs.constants
    u = reconstruct_velocity(vs.omega)
    _, Z = g.mesh
    domega = (-advect(u, vs.omega).data
              + c.buoyancy * ddx(vs.theta_S)
              - c.f * ddz(vs.u_T))
    du_T = -advect(u, vs.u_T).data - c.f * u.x_comp.data - c.buoyancy * c.s * Z
    dtheta = -advect(u, vs.theta_S).data - c.s * vs.u_T.data
    return (ScalarField(g, domega), ScalarField(g, du_T), ScalarField(g, dtheta))


def pressure_solve(state: State) -> ScalarField:
    """Zero-mean pressure from the Neumann problem implied by incompressibility.

    Interior source: div(f u_T x_hat + b theta z_hat) - sum_ij Dj u_i Di u_j.
    On flat walls the boundary datum reduces to (f u_T x_hat + b theta z_hat).n
    because the wall curvature term vanishes.
    """
    g = state.grid
    c = state.constants
    ux, uz = state.u_S.x_comp, state.u_S.z_comp
    dux_dx, dux_dz = ddx(ux), ddz(ux)
    duz_dx, duz_dz = ddx(uz), ddz(uz)
    lin_x = c.f * state.u_T.data
    lin_z = c.buoyancy * state.theta_S.data
    rhs = (_dx_arr(lin_x, g) + _dz_arr(lin_z, g)
           - (dux_dx**2 + 2.0 * dux_dz * duz_dx + duz_dz**2))
    bc = BoundaryData(-lin_x[:, 0], lin_x[:, -1], -lin_z[0, :], lin_z[-1, :])
    return neumann_solver(g).solve(ScalarField(g, rhs), bc)


def _dx_arr(a: np.ndarray, g: Grid) -> np.ndarray:
    return ddx(ScalarField(g, a))


def _dz_arr(a: np.ndarray, g: Grid) -> np.ndarray:
    return ddz(ScalarField(g, a))


def _axpy(state: State, ten: Tendency, dt: float) -> State:
    g = state.grid
    return State(
        VectorField(
            ScalarField(g, state.u_S.x_comp.data + dt * ten.du_S.x_comp.data),
            ScalarField(g, state.u_S.z_comp.data + dt * ten.du_S.z_comp.data),
        ),
        ScalarField(g, state.u_T.data + dt * ten.du_T.data),
        ScalarField(g, state.theta_S.data + dt * ten.dtheta_S.data),
        state.t + dt,
        state.constants,
    )


def step_rk4(state: State, dt: float) -> State:
    """One classical RK4 step; the velocity increment is re-projected."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = state.grid
    k1 = rhs_primitive(state)
    k2 = rhs_primitive(_axpy(state, k1, dt / 2))
    k3 = rhs_primitive(_axpy(state, k2, dt / 2))
    k4 = rhs_primitive(_axpy(state, k3, dt))

    def comb(sel):
        return (dt / 6.0) * (sel(k1) + 2 * sel(k2) + 2 * sel(k3) + sel(k4))

    inc_x = comb(lambda k: k.du_S.x_comp.data)
    inc_z = comb(lambda k: k.du_S.z_comp.data)
    # final safety projection of the combined velocity increment
    inc_x, inc_z = leray_projector(g).project_arrays(inc_x, inc_z)
    out = State(
        VectorField(ScalarField(g, state.u_S.x_comp.data + inc_x),
                    ScalarField(g, state.u_S.z_comp.data + inc_z)),
        ScalarField(g, state.u_T.data + comb(lambda k: k.du_T.data)),
        ScalarField(g, state.theta_S.data + comb(lambda k: k.dtheta_S.data)),
        state.t + dt,
        state.constants,
    )
    if not out.is_finite():
        raise BlowupError(f"non-finite state after step at t={state.t} (dt={dt} too large?)")
    return out


def step_rk4_vorticity(vs: VortState, dt: float) -> VortState:
    """RK4 for the vorticity formulation."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = vs.grid

    def add(y, ks, c):
        return VortState(
            ScalarField(g, y.omega.data + c * ks[0].data),
            ScalarField(g, y.u_T.data + c * ks[1].data),
            ScalarField(g, y.theta_S.data + c * ks[2].data),
            y.t + c, vs.constants,
        )

    k1 = rhs_vorticity(vs)
    k2 = rhs_vorticity(add(vs, k1, dt / 2))
    k3 = rhs_vorticity(add(vs, k2, dt / 2))
    k4 = rhs_vorticity(add(vs, k3, dt))
    fields = []
    for i, base in enumerate((vs.omega, vs.u_T, vs.theta_S)):
        fields.append(ScalarField(g, base.data + (dt / 6.0) * (
            k1[i].data + 2 * k2[i].data + 2 * k3[i].data + k4[i].data)))
    out = VortState(fields[0], fields[1], fields[2], vs.t + dt, vs.constants)
    if not out.is_finite():
        raise BlowupError(f"non-finite vorticity state after step at t={vs.t}")
    return out


DEFAULT_DT_MAX = 0.05


def cfl_dt(state: State, cfl: float, dt_max: float = DEFAULT_DT_MAX) -> float:
    """Advective time step dt = cfl * min(dx, dz) / max speed, capped at dt_max."""
    if not (0 < cfl <= 1):
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    g = state.grid
    speed = np.sqrt(state.u_S.x_comp.data**2 + state.u_S.z_comp.data**2)
    vmax = max(float(speed.max()), float(np.abs(state.u_T.data).max()))
    return min(cfl * min(g.dx, g.dz) / (vmax + 1e-12), dt_max)


def project_state(state: State) -> State:
    """Admit a state: project u_S onto the solenoidal wall-tangent space."""
    u, _ = leray_projector(state.grid).project(state.u_S)
    return state.replace(u_S=u)


def vort_from_primitive(state: State) -> VortState:
    return VortState(curl2d(state.u_S), state.u_T, state.theta_S,
                     state.t, state.constants)
