"""
Fixed-step RK4 integration of -u'' + V u = E u on a grid.

The step is the grid spacing so solutions stay aligned with the nodes used by
the Wronskian arithmetic. Potential values at cell midpoints come from cubic
Hermite interpolation of the potential and its derivative.
"""
from typing import Optional

import numpy as np
from numba import njit

from core.grid import GridFunction
from errors import SolutionOverflow
from logger_config import logger
from settings import get_settings


@njit(cache=True)
def _rk4_step(y0, p0, va, vm, vb, energy, step):
    k1u = p0
    k1p = (va - energy) * y0
    k2u = p0 + 0.5 * step * k1p
    k2p = (vm - energy) * (y0 + 0.5 * step * k1u)
    k3u = p0 + 0.5 * step * k2p
    k3p = (vm - energy) * (y0 + 0.5 * step * k2u)
    k4u = p0 + step * k3p
    k4p = (vb - energy) * (y0 + step * k3u)
    y1 = y0 + step * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
    p1 = p0 + step * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
    return y1, p1


@njit(cache=True)
def _rk4_sweep(V, Vmid, energy, h, start, direction, cap, u, du):
    """Integrate from ``start`` towards one end; return the failing node or -1"""
    n = V.shape[0]
    step = h * direction
    i = start
    while 0 <= i + direction < n:
        j = i + direction
        cell = i if direction > 0 else j
        y1, p1 = _rk4_step(u[i], du[i], V[i], Vmid[cell], V[j], energy, step)
        u[j] = y1
        du[j] = p1
        if not abs(y1) <= cap:
            return j
        i = j
    return -1


def midpoint_values(V: GridFunction) -> np.ndarray:
    """Cubic Hermite values of V at the n-1 cell midpoints"""
    h = V.grid.h
    v, dv = V.values, V.derivs
    return 0.5 * (v[:-1] + v[1:]) + h * (dv[:-1] - dv[1:]) / 8.0


def solve_ivp(
    V: GridFunction,
    E: complex,
    x_start: float,
    u0: complex,
    du0: complex,
    cap: Optional[float] = None,
) -> GridFunction:
    """Solve the Schrodinger equation with data at a grid node, both directions"""
    grid = V.grid
    cap = get_settings().magnitude_cap if cap is None else cap
    start = grid.index_of(x_start)
    energy = complex(E)

    u = np.zeros(grid.n, dtype=complex)
    du = np.zeros(grid.n, dtype=complex)
    u[start] = complex(u0)
    du[start] = complex(du0)
    Vmid = midpoint_values(V)

    for direction in (1, -1):
        failed = _rk4_sweep(V.values, Vmid, energy, grid.h, start, direction, cap, u, du)
        if failed >= 0:
            logger.warning("ivp_overflow", x=float(grid.x[failed]), energy=str(energy))
            raise SolutionOverflow(
                "solution exceeded the magnitude cap",
                {"x": float(grid.x[failed]), "cap": cap, "energy": [energy.real, energy.imag]},
            )

    return GridFunction(grid, u, du, energy=energy)


def schrodinger_residual(u: GridFunction, V: GridFunction, E: complex) -> float:
    """Max scaled residual |-u'' + (V - E) u| / (1 + |u|) on interior nodes.

    u'' is the five-point finite difference; nodes whose stencil touches a
    flagged or non-finite value are skipped.
    """
    h = u.grid.h
    f = u.values
    d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    centre = slice(2, -2)
    res = np.abs(-d2 + (V.values[centre] - E) * f[centre]) / (1 + np.abs(f[centre]))

    bad = u.flagged | V.flagged | ~np.isfinite(f) | ~np.isfinite(V.values)
    touched = bad[:-4] | bad[1:-3] | bad[2:-2] | bad[3:-1] | bad[4:]
    res = res[~touched]
    return float(np.max(res)) if res.size else 0.0
