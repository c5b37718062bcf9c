"""Equilibrium construction, critical-point conditions, and Arnold stability.

The workhorse exact steady family (normalized constants) is

    u_S = (-z, 0),   u_T = C z,   theta_S = C x + G(z),

steady for any shear amplitude C and any smooth vertical profile G, with
pressure C z x plus the hydrostatic antiderivative of G.  Its potential
vorticity is q = 1 + C^2 - G'(z): constant for G = 0 (degenerate for
stability analysis), z-graded otherwise.

Critical points of the constrained energy satisfy, with w = skew-grad of
Phi'(q_e),

    u_Se  = -s w,
    u_Te  = w . grad theta_Se,
    gamma = w . (grad u_Te + f x_hat),      gamma = (g/theta0) z,

plus a single boundary constant a_0 = Phi'(q_e) on the (connected) wall.
Phi is recovered from the Bernoulli function K via
Phi(lambda) = lambda (int K(t)/t^2 dt + C), equivalently
lambda Phi''(lambda) = K'(lambda).

Formal stability requires Phi''(q_e) > 0 where

    Phi''(q_e) = (y_hat x grad q_e) . u_Se / |grad q_e|^2,

with y_hat x (a_x, a_z) = (a_z, -a_x) in slice components; nonlinear
stability additionally requires a finite upper bound lambda_2, certified
through the perturbation norm

    Q(delta) = int( |delta u_S|^2/2 + delta u_T^2/2 ) dV
             + lambda_1 int( delta q^2 ) dV,

where delta q is the potential vorticity of the perturbation fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .domain import (
    Constants,
    Grid,
    ScalarField,
    State,
    VectorField,
    volume_integral,
)
from .diagnostics import potential_vorticity
from .dynamics import cfl_dt, rhs_primitive, step_rk4, DEFAULT_DT_MAX
from .operators import grad, perp_grad


@dataclass(frozen=True)
class EadyParams:
    """Shear amplitude C and optional vertical temperature profile G(z)."""

    C: float = 1.0
    G: Optional[Callable[[np.ndarray], np.ndarray]] = None


def eady_state(grid: Grid, constants: Constants, params: EadyParams) -> State:
    """Sample the exact steady shear family; requires normalized constants."""
    if not constants.is_normalized():
        raise ValueError("the exact steady family requires f = s = g = theta0 = 1")
    X, Z = grid.mesh
    gz = params.G(Z) if params.G is not None else np.zeros_like(Z)
    return State(
        VectorField(ScalarField(grid, -Z), ScalarField(grid, np.zeros_like(Z))),
        ScalarField(grid, params.C * Z),
        ScalarField(grid, params.C * X + gz),
        0.0,
        constants,
    )


def steady_residual(state: State) -> tuple[float, float, float]:
    """Sup norms of the three tendencies; zero for exact steady states."""
    ten = rhs_primitive(state)
    du = np.sqrt(ten.du_S.x_comp.data**2 + ten.du_S.z_comp.data**2)
    return (float(du.max()),
            float(np.abs(ten.du_T.data).max()),
            float(np.abs(ten.dtheta_S.data).max()))


# ---------------------------------------------------------------------------
# critical-point conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EcConditionsReport:
    r_u_S: float        # sup |u_Se + s w|
    r_u_T: float        # sup |u_Te - w . grad theta_Se|
    r_gamma: float      # sup |gamma_S - w . (grad u_Te + f x_hat)|
    a0_spread: float    # max - min of Phi'(q_e) over boundary nodes


def ec_conditions_residual(state_e: State, phi_prime) -> EcConditionsReport:
    """Residuals of the critical-point conditions for a supplied Phi'."""
    g = state_e.grid
    c = state_e.constants
    q = potential_vorticity(state_e)
    chi = ScalarField(g, np.asarray(phi_prime(q.data), dtype=np.float64))
    w = perp_grad(chi)  # curl(Phi'(q) y_hat) in slice components
    r1 = np.sqrt((state_e.u_S.x_comp.data + c.s * w.x_comp.data)**2
                 + (state_e.u_S.z_comp.data + c.s * w.z_comp.data)**2)
    gth = grad(state_e.theta_S)
    r2 = state_e.u_T.data - (w.x_comp.data * gth.x_comp.data
                             + w.z_comp.data * gth.z_comp.data)
    X, Z = g.mesh
    gut = grad(state_e.u_T)
    r3 = (c.buoyancy * Z
          - (w.x_comp.data * (gut.x_comp.data + c.f)
             + w.z_comp.data * gut.z_comp.data))
    bvals = np.concatenate([chi.data[0, :], chi.data[-1, :],
                            chi.data[:, 0], chi.data[:, -1]])
    return EcConditionsReport(
        float(r1.max()), float(np.abs(r2).max()), float(np.abs(r3).max()),
        float(bvals.max() - bvals.min()),
    )


def eady_phi_prime(C: float) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form Phi' for the steady family with G(z) = z^2/2.

    That state has q_e = 1 + C^2 - z, so Phi'(q) = -(1 + C^2 - q)^2 / 2
    reproduces Phi'(q_e) = -z^2/2 and hence all critical-point conditions;
    the induced curvature is Phi''(q_e) = z.
    """
    K = 1.0 + C * C

    def phi_p(q):
        return -0.5 * (K - q) ** 2

    return phi_p


# ---------------------------------------------------------------------------
# Phi from the Bernoulli function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiTable:
    """Phi and its first two lambda-derivatives tabulated on a grid."""

    lam: np.ndarray
    phi: np.ndarray
    phi_p: np.ndarray
    phi_pp: np.ndarray


def _cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, locally quadratic (Simpson)."""
    n = len(y)
    out = np.zeros(n)
    if n >= 3:
        inc = (h / 12.0) * (5.0 * y[:-2] + 8.0 * y[1:-1] - y[2:])
        out[1:-1] = np.cumsum(inc)
        out[-1] = out[-2] + (h / 12.0) * (-y[-3] + 8.0 * y[-2] + 5.0 * y[-1])
    elif n == 2:
        out[1] = h * (y[0] + y[1]) / 2.0
    return out


def phi_from_K(K: Callable[[np.ndarray], np.ndarray], C_int: float,
               lambda_grid: Sequence[float]) -> PhiTable:
    """Tabulate Phi(lambda) = lambda (int_{lam0}^lambda K(t)/t^2 dt + C_int).

    The grid must be uniform and stay on one side of zero (the kernel is
    singular at t = 0).  Phi' and Phi'' come from second-order differences
    on the grid.
    """
    lam = np.asarray(lambda_grid, dtype=np.float64)
    if lam.ndim != 1 or len(lam) < 5:
        raise ValueError("lambda_grid must be 1D with at least 5 points")
    h = lam[1] - lam[0]
    if h <= 0 or not np.allclose(np.diff(lam), h, rtol=1e-10, atol=0.0):
        raise ValueError("lambda_grid must be uniform and increasing")
    if lam.min() <= 0 < lam.max() or lam.min() < 0 <= lam.max():
        raise ValueError("lambda_grid must not cross zero")
    Kv = np.asarray(K(lam), dtype=np.float64)
    if not np.isfinite(Kv).all():
        raise ValueError("K produced non-finite values on the grid")
    inner = _cumulative_simpson(Kv / lam**2, h)
    phi = lam * (inner + C_int)
    phi_p = _diff1(phi, h)
    phi_pp = _diff1(phi_p, h)
    return PhiTable(lam, phi, phi_p, phi_pp)


def _diff1(y: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (2 * h)
    out[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
    out[-1] = (3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h)
    return out


# ---------------------------------------------------------------------------
# stability reports
# ---------------------------------------------------------------------------

STABLE = "stable"
NOT_ESTABLISHED = "not-established"
DEGENERATE = "degenerate"


def verdicts(lambda1: float, lambda2: float, mask_fraction: float) -> tuple[str, str]:
    """Tri-state verdict logic: (formal, nonlinear)."""
    if mask_fraction >= 1.0:
        return DEGENERATE, DEGENERATE
    formal = STABLE if lambda1 > 0 else NOT_ESTABLISHED
    nonlinear = STABLE if (lambda1 > 0 and np.isfinite(lambda2)) else NOT_ESTABLISHED
    return formal, nonlinear


@dataclass(frozen=True)
class StabilityReport:
    phi_pp: ScalarField            # curvature field, nan where degenerate
    degenerate_mask: np.ndarray    # True where |grad q_e|^2 below threshold
    lambda1: float
    lambda2: float
    formal_verdict: str
    nonlinear_verdict: str

    @property
    def masked_fraction(self) -> float:
        return float(self.degenerate_mask.mean())


# relative degeneracy threshold on |grad q|^2, with an absolute floor
DEG_THRESHOLD_REL = 1e-8
DEG_THRESHOLD_ABS = 1e-14


def formal_stability_field(state_e: State) -> StabilityReport:
    """Evaluate Phi''(q_e) = (y_hat x grad q_e).u_Se / |grad q_e|^2 nodewise."""
    g = state_e.grid
    q = potential_vorticity(state_e)
    gq = grad(q)
    gq2 = gq.x_comp.data**2 + gq.z_comp.data**2
    eps = max(DEG_THRESHOLD_REL * float(gq2.max()), DEG_THRESHOLD_ABS)
    mask = gq2 < eps
    # y_hat x (a_x, a_z) = (a_z, -a_x)
    numer = (gq.z_comp.data * state_e.u_S.x_comp.data
             - gq.x_comp.data * state_e.u_S.z_comp.data)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_pp = np.where(mask, np.nan, numer / gq2)
    if mask.all():
        lam1 = lam2 = float("nan")
    else:
        lam1 = float(np.nanmin(phi_pp))
        lam2 = float(np.nanmax(phi_pp))
    formal, nonlinear = verdicts(lam1, lam2, float(mask.mean()))
    # masked nodes carry nan; ScalarField tolerates non-finite entries
    return StabilityReport(ScalarField(g, phi_pp), mask, lam1, lam2,
                           formal, nonlinear)


# ---------------------------------------------------------------------------
# perturbation norm and experiment
# ---------------------------------------------------------------------------

def q_norm(delta: tuple[VectorField, ScalarField, ScalarField],
           lambda1: float, constants: Constants = Constants()) -> float:
    """Perturbation norm Q1 + Q2; delta q is the PV of the perturbation fields."""
    if not (lambda1 > 0):
        raise ValueError("q_norm requires lambda1 > 0")
    du, duT, dth = delta
    g = du.grid
    q1 = volume_integral(ScalarField(
        g, 0.5 * (du.x_comp.data**2 + du.z_comp.data**2) + 0.5 * duT.data**2))
    dq = potential_vorticity(State(du, duT, dth, 0.0, constants))
    q2 = lambda1 * volume_integral(ScalarField(g, dq.data**2))
    return q1 + q2


def state_difference(a: State, b: State) -> tuple[VectorField, ScalarField, ScalarField]:
    g = a.grid
    return (
        VectorField(ScalarField(g, a.u_S.x_comp.data - b.u_S.x_comp.data),
                    ScalarField(g, a.u_S.z_comp.data - b.u_S.z_comp.data)),
        ScalarField(g, a.u_T.data - b.u_T.data),
        ScalarField(g, a.theta_S.data - b.theta_S.data),
    )


def perturbation_experiment(state_e: State,
                            delta0: tuple[VectorField, ScalarField, ScalarField],
                            t_end: float,
                            lambda1: float,
                            dt: Optional[float] = None,
                            cfl: float = 0.5,
                            dt_max: float = DEFAULT_DT_MAX,
                            sample_every: int = 1,
                            steady_tol: float = 1e-8) -> list[tuple[float, float]]:
    """Evolve state_e + delta0 and record the perturbation norm over time."""
    res = steady_residual(state_e)
    if max(res) > steady_tol:
        raise ValueError(f"base state is not steady: residuals {res} > {steady_tol}")
    g = state_e.grid
    du, duT, dth = delta0
    state = State(
        VectorField(ScalarField(g, state_e.u_S.x_comp.data + du.x_comp.data),
                    ScalarField(g, state_e.u_S.z_comp.data + du.z_comp.data)),
        ScalarField(g, state_e.u_T.data + duT.data),
        ScalarField(g, state_e.theta_S.data + dth.data),
        state_e.t,
        state_e.constants,
    )
    series = [(state.t, q_norm(state_difference(state, state_e), lambda1,
                               state_e.constants))]
    step = 0
    while state.t < t_end - 1e-12:
        h = dt if dt is not None else cfl_dt(state, cfl, dt_max)
        h = min(h, t_end - state.t)
        state = step_rk4(state, h)
        step += 1
        if step % sample_every == 0 or state.t >= t_end - 1e-12:
            series.append((state.t, q_norm(state_difference(state, state_e),
                                           lambda1, state_e.constants)))
    return series
