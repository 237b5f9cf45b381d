"""
Grids, grid functions and the three Dirichlet boundary problems.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import maximum_filter1d

from errors import GridMismatch, TransformError

# Energies, factorization constants and spectral parameters are plain complex scalars.
Energy = complex


class ProblemKind(str, Enum):
    FINITE_INTERVAL = "FiniteInterval"
    HALF_LINE = "HalfLine"
    WHOLE_LINE = "WholeLine"


class PotentialClass(str, Enum):
    CONFINING = "Confining"
    SCATTERING = "Scattering"
    GENERIC = "Generic"


@dataclass(frozen=True)
class Grid:
    """Uniform grid with an odd number of nodes"""

    x0: float
    x1: float
    n: int

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ValueError(f"grid requires x0 < x1, got [{self.x0}, {self.x1}]")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"grid needs an odd node count >= 3, got {self.n}")

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.n)

    @property
    def is_symmetric(self) -> bool:
        return abs(self.x0 + self.x1) <= 1e-12 * max(abs(self.x0), abs(self.x1))

    def index_of(self, x: float) -> int:
        """Index of the node at x; x has to sit on the grid"""
        pos = (x - self.x0) / self.h
        idx = int(round(pos))
        if idx < 0 or idx >= self.n or abs(pos - idx) > 1e-6:
            raise ValueError(f"x={x} is not a node of {self}")
        return idx

    def matches(self, other: "Grid") -> bool:
        return (
            self.n == other.n
            and abs(self.x0 - other.x0) <= 1e-12 * (1 + abs(self.x0))
            and abs(self.x1 - other.x1) <= 1e-12 * (1 + abs(self.x1))
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex function sampled with its first derivative on a grid.

    ``energy`` is set when the function solves a Schrodinger equation at a
    known spectral parameter; ``exact`` marks analytic (closed-form) samples;
    ``flags`` marks nodes that are singular or otherwise untrustworthy.
    """

    grid: Grid
    values: np.ndarray
    derivs: np.ndarray
    energy: Optional[complex] = None
    exact: bool = False
    flags: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        derivs = np.asarray(self.derivs, dtype=complex)
        if values.shape != (self.grid.n,) or derivs.shape != (self.grid.n,):
            raise GridMismatch(
                "values and derivs must have one entry per node",
                {"n": self.grid.n, "values": values.shape, "derivs": derivs.shape},
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivs", derivs)
        if self.flags is not None:
            object.__setattr__(self, "flags", np.asarray(self.flags, dtype=bool))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def scale(self) -> float:
        finite = np.isfinite(self.values)
        return float(np.max(np.abs(self.values[finite]))) if finite.any() else 0.0

    @property
    def flagged(self) -> np.ndarray:
        if self.flags is None:
            return np.zeros(self.grid.n, dtype=bool)
        return self.flags

    def scaled(self, factor: complex) -> "GridFunction":
        return replace(self, values=self.values * factor, derivs=self.derivs * factor)

    def at(self, x: float) -> complex:
        return complex(self.values[self.grid.index_of(x)])


def same_grid(*functions: GridFunction) -> Grid:
    """Shared grid of the arguments, or GridMismatch"""
    grid = functions[0].grid
    for f in functions[1:]:
        if not grid.matches(f.grid):
            raise GridMismatch("grid functions live on different grids",
                               {"left": str(grid), "right": str(f.grid)})
    return grid


def zero_potential(grid: Grid) -> GridFunction:
    return GridFunction(grid, np.zeros(grid.n), np.zeros(grid.n), exact=True)


def harmonic_potential(grid: Grid, omega: float = 1.0) -> GridFunction:
    """Confining seed V(x) = omega^2 x^2"""
    x = grid.x
    return GridFunction(grid, omega ** 2 * x ** 2, 2 * omega ** 2 * x, exact=True)


@dataclass(frozen=True)
class BoundaryProblem:
    """One of the three Dirichlet problems, truncated for unbounded domains"""

    kind: ProblemKind
    a: float
    b: float
    L: Optional[float] = None
    potential_class: PotentialClass = PotentialClass.GENERIC

    def __post_init__(self):
        if not self.a < self.b:
            raise TransformError("boundary problem needs a < b", {"a": self.a, "b": self.b})
        if self.kind == ProblemKind.HALF_LINE and self.a != 0.0:
            raise TransformError("half-line problems start at the origin", {"a": self.a})
        if self.kind != ProblemKind.FINITE_INTERVAL and (self.L is None or self.L <= 0):
            raise TransformError("unbounded problems need a positive truncation L")

    @classmethod
    def finite(cls, a: float, b: float) -> "BoundaryProblem":
        return cls(ProblemKind.FINITE_INTERVAL, float(a), float(b))

    @classmethod
    def half_line(cls, L: float, potential_class=PotentialClass.SCATTERING) -> "BoundaryProblem":
        return cls(ProblemKind.HALF_LINE, 0.0, float(L), float(L), PotentialClass(potential_class))

    @classmethod
    def whole_line(cls, L: float, potential_class=PotentialClass.SCATTERING) -> "BoundaryProblem":
        return cls(ProblemKind.WHOLE_LINE, -float(L), float(L), float(L), PotentialClass(potential_class))

    @property
    def left_is_finite(self) -> bool:
        return self.kind != ProblemKind.WHOLE_LINE

    @property
    def right_is_finite(self) -> bool:
        return self.kind == ProblemKind.FINITE_INTERVAL

    @property
    def is_symmetric(self) -> bool:
        return abs(self.a + self.b) <= 1e-12 * max(abs(self.a), abs(self.b))

    def grid(self, n: int) -> Grid:
        return Grid(self.a, self.b, n)

    def with_truncation(self, L: float) -> "BoundaryProblem":
        """Same problem truncated at a different L (finite intervals unchanged)"""
        if self.kind == ProblemKind.FINITE_INTERVAL:
            return self
        a = 0.0 if self.kind == ProblemKind.HALF_LINE else -float(L)
        return replace(self, a=a, b=float(L), L=float(L))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "a": self.a,
            "b": self.b,
            "L": self.L,
            "potential_class": self.potential_class.value,
        }


def scattering_moment(V: GridFunction, problem: BoundaryProblem) -> float:
    """Truncated proxy of the moment integral of |x V(x)| over the domain"""
    x = V.x
    weight = np.abs(x - problem.a) if problem.kind == ProblemKind.HALF_LINE else np.abs(x)
    integrand = weight * np.abs(np.nan_to_num(V.values, nan=0.0, posinf=0.0, neginf=0.0))
    return float(trapezoid(integrand, x))


def crossing_nodes(
    values: np.ndarray, window: int = 8, depth: float = 0.25, floor: float = 0.0
) -> np.ndarray:
    """Interior nodes where a sampled function passes through zero.

    A node qualifies when |f| has a local minimum there that is at most
    ``depth`` times the maximum of |f| over +-``window`` nodes and the phase
    of f turns by more than pi/2 between the two neighbours.
    Minima below ``floor`` times the window maximum count without the phase
    test.
    """
    f = np.asarray(values, dtype=complex)
    m = np.abs(f)
    finite = np.isfinite(m)
    safe = np.where(finite, m, 0.0)
    local = maximum_filter1d(safe, size=2 * window + 1, mode="nearest")

    mid = slice(1, -1)
    is_min = (safe[mid] < safe[:-2]) & (safe[mid] <= safe[2:])
    deep = safe[mid] <= depth * local[mid]
    with np.errstate(invalid="ignore"):
        turned = (f[:-2] * np.conj(f[2:])).real < 0
    exact = (safe[mid] == 0.0) & (safe[:-2] > 0)
    ok = finite[:-2] & finite[mid] & finite[2:]
    tiny = safe[mid] <= floor * local[mid]
    hits = ok & ((is_min & (tiny | (deep & turned))) | exact)
    return np.nonzero(hits)[0] + 1
