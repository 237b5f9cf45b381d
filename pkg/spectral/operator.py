"""
Three-point finite-difference discretization of -d^2/dx^2 + V with
Dirichlet conditions at both ends of the (truncated) domain.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from core.grid import BoundaryProblem, GridFunction
from errors import ResampleError

MIN_NODES = 16


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Complex symmetric tridiagonal matrix with diag and one off-diagonal"""

    diag: np.ndarray
    off: np.ndarray
    h: float = 1.0
    problem: Optional[BoundaryProblem] = None

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=complex)
        off = np.asarray(self.off, dtype=complex)
        if off.ndim == 0:
            off = np.full(max(diag.size - 1, 0), complex(off))
        if off.shape != (max(diag.size - 1, 0),):
            raise ValueError(f"off-diagonal needs {diag.size - 1} entries, got {off.shape}")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def x(self) -> np.ndarray:
        """Interior nodes the rows refer to"""
        if self.problem is None:
            return np.arange(1, self.n + 1) * self.h
        return self.problem.a + self.h * np.arange(1, self.n + 1)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def resample(V: GridFunction, x: np.ndarray) -> np.ndarray:
    """Cubic Hermite values of V at points x inside its grid"""
    grid = V.grid
    lo, hi = float(x.min()), float(x.max())
    if lo < grid.x0 - 1e-12 or hi > grid.x1 + 1e-12:
        raise ResampleError("window lies outside the potential grid",
                            {"window": [lo, hi], "grid": [grid.x0, grid.x1]})

    first = max(int(np.floor((lo - grid.x0) / grid.h)), 0)
    last = min(int(np.ceil((hi - grid.x0) / grid.h)), grid.n - 1)
    cells = slice(first, last + 1)
    bad = V.flagged[cells] | ~np.isfinite(V.values[cells]) | ~np.isfinite(V.derivs[cells])
    if bad.any():
        where = grid.x[cells][bad]
        raise ResampleError("potential has singular nodes inside the window",
                            {"x": [float(v) for v in where[:10]], "count": int(bad.sum())})

    # singular nodes outside the window do not reach the evaluated cells
    v = np.where(np.isfinite(V.values), V.values, 0.0)
    dv = np.where(np.isfinite(V.derivs), V.derivs, 0.0)
    re = CubicHermiteSpline(grid.x, v.real, dv.real)
    im = CubicHermiteSpline(grid.x, v.imag, dv.imag)
    return re(x) + 1j * im(x)


def discretize(V: GridFunction, problem: BoundaryProblem, n: int) -> TridiagonalOperator:
    """-d^2/dx^2 + V on n interior nodes of [a, b] with both ends eliminated"""
    if n < MIN_NODES:
        raise ValueError(f"discretization needs at least {MIN_NODES} interior nodes, got {n}")
    h = (problem.b - problem.a) / (n + 1)
    x = problem.a + h * np.arange(1, n + 1)

    grid = V.grid
    if grid.n == n + 2 and abs(grid.x0 - problem.a) < 1e-12 and abs(grid.x1 - problem.b) < 1e-12:
        inner = V.values[1:-1]
        if (V.flagged[1:-1] | ~np.isfinite(inner)).any():
            raise ResampleError("potential has singular nodes inside the window")
        values = inner
    else:
        values = resample(V, x)

    return TridiagonalOperator(diag=2.0 / h ** 2 + values, off=np.full(n - 1, -1.0 / h ** 2, dtype=complex),
                               h=h, problem=problem)
