"""Seed-deterministic initial conditions.

random_smooth builds a low-mode trigonometric superposition as an analytic
function of (x, z), so the same seed yields the same continuum field on every
grid.  The slice velocity comes from a streamfunction vanishing on the walls
(hence wall-tangent) and is passed through the Leray projector; the whole
triple is scaled so its largest sup norm equals the requested amplitude.

Coefficients are drawn from a splitmix64 stream: platform-independent 64-bit
integer arithmetic, so runs are bit-reproducible for a given seed.
"""

from __future__ import annotations

import numpy as np

from .domain import Constants, Grid, ScalarField, State, VectorField
from .dynamics import project_state
from .operators import perp_grad

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Minimal splitmix64 PRNG; next_float() is uniform on [0, 1)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z = z ^ (z >> 31)
        return z

    def next_float(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def next_coeff(self) -> float:
        """Uniform on [-1, 1)."""
        return 2.0 * self.next_float() - 1.0


def random_smooth(grid: Grid, seed: int, amplitude: float, modes: int,
                  constants: Constants = Constants()) -> State:
    """Projected low-mode random state with overall sup norm = amplitude."""
    if modes < 1:
        raise ValueError("modes must be >= 1")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    rng = SplitMix64(seed)
    X, Z = grid.mesh
    psi = np.zeros(grid.shape)
    u_T = np.zeros(grid.shape)
    theta = np.zeros(grid.shape)
    # fixed draw order: field-major, then kx, then kz
    for target in (psi, u_T, theta):
        for kx in range(1, modes + 1):
            for kz in range(1, modes + 1):
                c = rng.next_coeff() / (kx * kx + kz * kz)
                if target is psi:
                    target += c * np.sin(kx * np.pi * X / grid.Lx) \
                                * np.sin(kz * np.pi * Z / grid.Lz)
                else:
                    target += c * np.cos(kx * np.pi * X / grid.Lx) \
                                * np.cos(kz * np.pi * Z / grid.Lz)
    u = perp_grad(ScalarField(grid, psi))
    sup = max(float(np.abs(u.x_comp.data).max()),
              float(np.abs(u.z_comp.data).max()),
              float(np.abs(u_T).max()),
              float(np.abs(theta).max()))
    scale = amplitude / sup if sup > 0 else 0.0
    state = State(
        VectorField(ScalarField(grid, scale * u.x_comp.data),
                    ScalarField(grid, scale * u.z_comp.data)),
        ScalarField(grid, scale * u_T),
        ScalarField(grid, scale * theta),
        0.0,
        constants,
    )
    return project_state(state)
