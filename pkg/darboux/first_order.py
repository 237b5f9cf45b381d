"""
First-order SUSY transformation: the intermediate potential and the map of
solutions, both built from the log-derivative w = u1'/u1.
"""
import numpy as np
from scipy.ndimage import binary_dilation

from core.grid import GridFunction, crossing_nodes, same_grid
from errors import TransformError
from logger_config import logger

# minima of |u1| below this fraction of the nearby maximum count as zeros
GUARD_THRESHOLD = 1e-3
GUARD_NODES = 2


def _log_derivative(u1: GridFunction):
    if u1.energy is None:
        raise TransformError("transformation function needs its energy")
    with np.errstate(divide="ignore", invalid="ignore"):
        w = u1.derivs / u1.values
    return w, complex(u1.energy)


def singular_mask(u1: GridFunction) -> np.ndarray:
    """Nodes inside the guard band around zeros of u1"""
    near = np.zeros(u1.grid.n, dtype=bool)
    near[crossing_nodes(u1.values, floor=GUARD_THRESHOLD)] = True
    near |= ~np.isfinite(u1.values)
    if near.any():
        near = binary_dilation(near, iterations=GUARD_NODES)
    return near


def first_order_potential(V0: GridFunction, u1: GridFunction) -> GridFunction:
    """Intermediate potential V0 - 2 w' with w' = V0 - alpha - w^2 eliminated"""
    grid = same_grid(V0, u1)
    w, alpha = _log_derivative(u1)
    dw = V0.values - alpha - w * w

    values = V0.values - 2 * dw
    derivs = V0.derivs - 4 * w * dw

    mask = singular_mask(u1) | V0.flagged | ~np.isfinite(values)
    if mask.any():
        logger.warning("intermediate_singular", nodes=int(mask.sum()),
                       first_x=float(grid.x[np.argmax(mask)]))
        values = np.where(mask, np.nan, values)
        derivs = np.where(mask, np.nan, derivs)
    return GridFunction(grid, values, derivs, exact=u1.exact and V0.exact,
                        flags=mask if mask.any() else None)


def first_order_map(psi: GridFunction, u1: GridFunction) -> GridFunction:
    """psi -> -psi' + w psi; the derivative comes from the intermediate equation"""
    grid = same_grid(psi, u1)
    if psi.energy is None:
        raise TransformError("mapped solution needs its energy")
    w, alpha = _log_derivative(u1)
    E = complex(psi.energy)

    values = -psi.derivs + w * psi.values
    derivs = (E - alpha - w * w) * psi.values + w * psi.derivs

    mask = singular_mask(u1) | ~np.isfinite(values)
    if mask.any():
        values = np.where(mask, np.nan, values)
        derivs = np.where(mask, np.nan, derivs)
    return GridFunction(grid, values, derivs, energy=E, exact=psi.exact and u1.exact,
                        flags=mask if mask.any() else None)
