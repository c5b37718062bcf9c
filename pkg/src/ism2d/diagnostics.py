"""Conserved quantities, Sobolev norms, and the blow-up monitor.

Conserved along exact solutions:

* energy  h = integral( |u_S|^2/2 + u_T^2/2 - gamma_S theta_S ) dV with
  gamma_S = (g/theta0) z,
* generalized enstrophy  C_Phi = integral( Phi(q) ) dV for any differentiable
  Phi of the potential vorticity q = curl(v_S).y_hat, where
  v_S = s u_S - (u_T + f x) grad theta_S,
* the parcel-wise PV itself (so max|q| is invariant).

The blow-up monitor tracks E(t), the sum of squared H^s norms of
(u_S, u_T, theta_S), together with the running time integral of
sup|grad u_S|; blow-up of one is equivalent to blow-up of the other.  The
Gronwall check compares sup|grad u_T| + sup|grad theta_S| against the
exponential envelope exp(integral(sup|grad u_S| + 1)) seeded by the initial
gradients and reports the fitted constant.

H^s norms nest the second-order difference operators s times; wall accuracy
degrades with s, which is acceptable for monitoring growth rather than
certifying values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import ScalarField, State, VectorField, volume_integral
from .dynamics import pressure_solve
from .operators import ddx, ddz, curl2d, grad


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy_h: float
    casimir: tuple[tuple[int, float], ...]  # ((order, value), ...)
    E_hs: float
    sup_grad_uS: float
    sup_grad_uT: float
    sup_grad_theta: float
    bkm_integral: float


def energy(state: State) -> float:
    """Quadrature of |u_S|^2/2 + u_T^2/2 - gamma_S theta_S."""
    g = state.grid
    _, Z = g.mesh
    gamma = state.constants.buoyancy * Z
    integrand = (0.5 * (state.u_S.x_comp.data**2 + state.u_S.z_comp.data**2)
                 + 0.5 * state.u_T.data**2
                 - gamma * state.theta_S.data)
    return volume_integral(ScalarField(g, integrand))


def potential_vorticity(state: State) -> ScalarField:
    """q = curl(v_S) with v_S = s u_S - (u_T + f x) grad theta_S."""
    g = state.grid
    c = state.constants
    X, _ = g.mesh
    m = state.u_T.data + c.f * X
    tx, tz = ddx(state.theta_S), ddz(state.theta_S)
    vx = c.s * state.u_S.x_comp.data - m * tx
    vz = c.s * state.u_S.z_comp.data - m * tz
    return curl2d(VectorField(ScalarField(g, vx), ScalarField(g, vz)))


def casimir(state: State, phi) -> float:
    """Quadrature of Phi(q); phi must map arrays elementwise."""
    q = potential_vorticity(state)
    vals = np.asarray(phi(q.data), dtype=np.float64)
    if vals.shape != q.data.shape:
        vals = np.broadcast_to(vals, q.data.shape).copy()
    if not np.isfinite(vals).all():
        raise ValueError("Phi(q) produced non-finite values")
    return volume_integral(ScalarField(state.grid, vals))


def casimir_moments(state: State, orders=(1, 2)) -> tuple[tuple[int, float], ...]:
    q = potential_vorticity(state)
    out = []
    for k in orders:
        out.append((k, volume_integral(ScalarField(state.grid, q.data**k))))
    return tuple(out)


def min_grid_for_order(s_order: int) -> int:
    return 2 * s_order + 5


def sobolev_norm_sq(f: ScalarField, s_order: int) -> float:
    """Squared H^s norm: sum over |alpha| <= s of integral (D^alpha f)^2 dV.

    D^alpha applies the x-derivative a1 times, then the z-derivative a2 times.
    """
    if s_order < 0:
        raise ValueError("s_order must be nonnegative")
    g = f.grid
    n_min = min_grid_for_order(s_order)
    if g.nx < n_min or g.nz < n_min:
        raise ValueError(
            f"grid {g.nx}x{g.nz} too small for s_order={s_order} (need >= {n_min})")
    # dx_pows[a1] = Dx^a1 f, then z-derivatives applied on top
    dx_pows = [f.data]
    for _ in range(s_order):
        dx_pows.append(ddx(ScalarField(g, dx_pows[-1])))
    total = 0.0
    for a1 in range(s_order + 1):
        cur = dx_pows[a1]
        for a2 in range(0, s_order - a1 + 1):
            if a2 > 0:
                cur = ddz(ScalarField(g, cur))
            total += volume_integral(ScalarField(g, cur * cur))
    return total


def E_of_t(state: State, s_order: int) -> float:
    """Blow-up functional: ||u_S||_{H^s}^2 + ||u_T||_{H^s}^2 + ||theta_S||_{H^s}^2."""
    return (sobolev_norm_sq(state.u_S.x_comp, s_order)
            + sobolev_norm_sq(state.u_S.z_comp, s_order)
            + sobolev_norm_sq(state.u_T, s_order)
            + sobolev_norm_sq(state.theta_S, s_order))


def sup_grad(f) -> float:
    """Max pointwise |grad| for a scalar; max over components for a vector."""
    if isinstance(f, VectorField):
        return max(sup_grad(f.x_comp), sup_grad(f.z_comp))
    g = grad(f)
    mag = np.sqrt(g.x_comp.data**2 + g.z_comp.data**2)
    return float(mag.max())


def bkm_accumulate(prev_integral: float, prev_val: float, new_val: float, dt: float) -> float:
    """Trapezoid increment of the running integral of sup|grad u_S|."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return prev_integral + dt * (prev_val + new_val) / 2.0


@dataclass(frozen=True)
class GronwallReport:
    M: float                      # max of the ratio series
    ratios: tuple[float, ...]     # ratio at each record
    degenerate: bool              # initial gradient was zero (floored)


def gronwall_check(records, init_grad: float) -> GronwallReport:
    """Fit the constant in the gradient bound against its exponential envelope.

    ratio(t) = (sup|grad u_T| + sup|grad theta|) /
               (init_grad * exp(bkm_integral(t) + t))

    The bound holding with constant M is a report, never an assertion.
    """
    if not records:
        raise ValueError("empty diagnostics series")
    ts = [r.t for r in records]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("records must have strictly increasing t")
    degenerate = not (init_grad > 0)
    floor = np.finfo(float).tiny if degenerate else init_grad
    t0 = records[0].t
    ratios = []
    for r in records:
        envelope = floor * float(np.exp(r.bkm_integral + (r.t - t0)))
        ratios.append((r.sup_grad_uT + r.sup_grad_theta) / envelope)
    return GronwallReport(max(ratios), tuple(ratios), degenerate)


@dataclass(frozen=True)
class PressureCheck:
    lhs: float
    rhs: float
    ratio: float
    exact_zero: bool


def pressure_estimate_check(state: State, s_order: int) -> PressureCheck:
    """Ratio of ||grad p||_{H^s} to its a priori bound; needs s_order >= 3.

    Bound: ||u_S||_{H^s} ||u_S||_{W^{1,inf}} + ||u_T||_{H^s} + ||theta||_{H^s}.
    """
    if s_order < 3:
        raise ValueError("pressure estimate requires s_order >= 3")
    p = pressure_solve(state)
    gp = grad(p)
    lhs = float(np.sqrt(sobolev_norm_sq(gp.x_comp, s_order)
                        + sobolev_norm_sq(gp.z_comp, s_order)))
    us_hs = float(np.sqrt(sobolev_norm_sq(state.u_S.x_comp, s_order)
                          + sobolev_norm_sq(state.u_S.z_comp, s_order)))
    w1inf = max(
        float(np.abs(state.u_S.x_comp.data).max()),
        float(np.abs(state.u_S.z_comp.data).max()),
        sup_grad(state.u_S),
    )
    rhs = (us_hs * w1inf
           + float(np.sqrt(sobolev_norm_sq(state.u_T, s_order)))
           + float(np.sqrt(sobolev_norm_sq(state.theta_S, s_order))))
    if rhs == 0.0:
        return PressureCheck(lhs, rhs, 0.0, True)
    return PressureCheck(lhs, rhs, lhs / rhs, False)


def make_record(state: State, s_order: int,
                prev: DiagnosticsRecord | None = None) -> DiagnosticsRecord:
    """Assemble one diagnostics row, accumulating the BKM integral from prev."""
    g_us = sup_grad(state.u_S)
    if prev is None:
        bkm = 0.0
    else:
        bkm = bkm_accumulate(prev.bkm_integral, prev.sup_grad_uS, g_us,
                             state.t - prev.t)
    return DiagnosticsRecord(
        t=state.t,
        energy_h=energy(state),
        casimir=casimir_moments(state),
        E_hs=E_of_t(state, s_order),
        sup_grad_uS=g_us,
        sup_grad_uT=sup_grad(state.u_T),
        sup_grad_theta=sup_grad(state.theta_S),
        bkm_integral=bkm,
    )
