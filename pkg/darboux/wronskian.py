"""
Wronskian of two grid functions.
"""
import numpy as np

from core.grid import GridFunction, same_grid
from logger_config import logger


def wronskian2(u: GridFunction, v: GridFunction) -> GridFunction:
    """W(u, v) = u v' - u' v on the shared grid.

    When both arguments carry their energies the derivative is the exact
    W' = (E_u - E_v) u v; otherwise it falls back to a second order
    finite difference of W.
    """
    grid = same_grid(u, v)
    values = u.values * v.derivs - u.derivs * v.values

    if u.energy is not None and v.energy is not None:
        derivs = (u.energy - v.energy) * u.values * v.values
    else:
        logger.debug("wronskian_fd_derivative", n=grid.n)
        derivs = np.gradient(values, grid.h, edge_order=2)

    flags = None
    if u.flags is not None or v.flags is not None:
        flags = u.flagged | v.flagged
    return GridFunction(grid, values, derivs, exact=u.exact and v.exact, flags=flags)
