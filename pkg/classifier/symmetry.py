"""
Parity checks on grids symmetric about the origin.
"""
import numpy as np

from core.grid import GridFunction
from errors import AsymmetricGrid


def _mirrored(V: GridFunction):
    if not V.grid.is_symmetric:
        raise AsymmetricGrid("parity checks need a grid symmetric about 0",
                             {"x0": V.grid.x0, "x1": V.grid.x1})
    values = V.values
    finite = np.isfinite(values) & np.isfinite(values[::-1])
    return values, values[::-1], finite


def pt_check(V: GridFunction) -> float:
    """max |V(-x) - conj(V(x))| over nodes where both values are finite"""
    values, mirrored, finite = _mirrored(V)
    if not finite.any():
        return 0.0
    return float(np.max(np.abs(mirrored[finite] - np.conj(values[finite]))))


def parity_deviation(V: GridFunction) -> float:
    """max |V(-x) - V(x)|"""
    values, mirrored, finite = _mirrored(V)
    if not finite.any():
        return 0.0
    return float(np.max(np.abs(mirrored[finite] - values[finite])))


def is_pt_symmetric(V: GridFunction, rel_tol: float = 1e-8) -> bool:
    return V.grid.is_symmetric and pt_check(V) <= rel_tol * max(V.scale, 1.0)


def is_even(V: GridFunction, rel_tol: float = 1e-8) -> bool:
    return V.grid.is_symmetric and parity_deviation(V) <= rel_tol * max(V.scale, 1.0)
