"""
Shooting for Dirichlet eigenvalues: integrate from the left end with
u(a) = 0, u'(a) = 1 and look at u(b).

The running solution is renormalized every RENORM_STEPS steps and the log
of the scale is carried separately, so complex energies with exponentially
growing solutions stay representable.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from core.grid import BoundaryProblem, GridFunction
from core.integrator import _rk4_step, midpoint_values
from errors import GridMismatch, NoConvergence, SolutionOverflow
from logger_config import logger

RENORM_STEPS = 50
MAX_SECANT = 50
SECANT_TOL = 1e-10


@njit(cache=True)
def _shoot(V, Vmid, energy, h, renorm_steps):
    """Return (u(b) / scale, log scale, log max |u|) of the left-end solution"""
    y = 0j
    p = 1.0 + 0j
    logscale = 0.0
    maxlog = -np.inf
    n = V.shape[0]
    for i in range(n - 1):
        y, p = _rk4_step(y, p, V[i], Vmid[i], V[i + 1], energy, h)
        mag = abs(y)
        if not (mag < np.inf) or not (abs(p) < np.inf):
            return y, logscale, maxlog
        if mag > 0.0:
            cur = math.log(mag) + logscale
            if cur > maxlog:
                maxlog = cur
        if (i + 1) % renorm_steps == 0:
            s = max(mag, abs(p))
            if s > 0.0:
                y /= s
                p /= s
                logscale += math.log(s)
    return y, logscale, maxlog


def _run(V: GridFunction, E: complex, problem: BoundaryProblem):
    grid = V.grid
    if abs(grid.x0 - problem.a) > 1e-12 or abs(grid.x1 - problem.b) > 1e-12:
        raise GridMismatch("potential grid does not span the problem window",
                           {"grid": [grid.x0, grid.x1], "window": [problem.a, problem.b]})
    y, logscale, maxlog = _shoot(V.values, midpoint_values(V), complex(E), grid.h, RENORM_STEPS)
    if not np.isfinite(y) or not np.isfinite(logscale) or not np.isfinite(maxlog):
        logger.warning("shoot_overflow", energy=str(E))
        raise SolutionOverflow("shooting solution is not finite",
                               {"energy": [complex(E).real, complex(E).imag]})
    return complex(y), logscale, maxlog


def shoot_mismatch(V: GridFunction, E: complex, problem: BoundaryProblem) -> complex:
    """u(b) divided by max |u| along the shot; zero at a Dirichlet eigenvalue"""
    y, logscale, maxlog = _run(V, E, problem)
    return y * math.exp(logscale - maxlog)


@dataclass(frozen=True)
class RefinedLevel:
    energy: complex
    mismatch: complex
    iterations: int

    def to_dict(self) -> dict:
        return {"energy": self.energy, "mismatch": self.mismatch, "iterations": self.iterations}


def refine_eigenvalue(V: GridFunction, E_guess: complex, problem: BoundaryProblem,
                      max_iter: int = MAX_SECANT, tol: float = SECANT_TOL) -> RefinedLevel:
    """Complex secant iteration on the shooting mismatch"""
    E0 = complex(E_guess)
    try:
        _, ref, _ = _run(V, E0, problem)

        def g(E):
            # fixed reference scale keeps g holomorphic in E
            y, logscale, _ = _run(V, E, problem)
            return y * np.exp(logscale - ref)

        E1 = E0 + 1e-4 * (1 + abs(E0))
        f0, f1 = g(E0), g(E1)
        for it in range(1, max_iter + 1):
            if f1 == f0:
                break
            E2 = E1 - f1 * (E1 - E0) / (f1 - f0)
            if not np.isfinite(E2):
                break
            if abs(E2 - E1) <= tol * (1 + abs(E2)):
                mismatch = shoot_mismatch(V, E2, problem)
                logger.debug("eigenvalue_refined", energy=str(E2), iterations=it)
                return RefinedLevel(E2, mismatch, it)
            E0, f0 = E1, f1
            E1, f1 = E2, g(E2)
    except SolutionOverflow as e:
        raise NoConvergence("shooting overflowed during refinement",
                            {"guess": [E0.real, E0.imag], **e.details}) from e

    raise NoConvergence("secant refinement did not converge",
                        {"guess": [complex(E_guess).real, complex(E_guess).imag], "max_iter": max_iter})
