"""
Elementary solutions of -u'' = E u used as transformation functions.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from core.grid import Grid, GridFunction


class ClosedFormKind(str, Enum):
    SIN_K = "SinK"        # sin(k x + c),  E = k^2
    COS_KC = "CosKC"      # cos(k x + c),  E = k^2
    SINH_A = "SinhA"      # sinh(a x + c), E = -a^2
    COSH_AC = "CoshAC"    # cosh(a x + c), E = -a^2
    EXP_A = "ExpA"        # exp(a x + c),  E = -a^2


@dataclass(frozen=True)
class ClosedForm:
    kind: ClosedFormKind
    param: complex
    shift: complex = 0j

    @property
    def energy(self) -> complex:
        p2 = complex(self.param) ** 2
        if self.kind in (ClosedFormKind.SIN_K, ClosedFormKind.COS_KC):
            return p2
        return -p2

    def evaluate(self, x: np.ndarray):
        p = complex(self.param)
        z = p * np.asarray(x, dtype=float) + complex(self.shift)
        if self.kind == ClosedFormKind.SIN_K:
            return np.sin(z), p * np.cos(z)
        if self.kind == ClosedFormKind.COS_KC:
            return np.cos(z), -p * np.sin(z)
        if self.kind == ClosedFormKind.SINH_A:
            return np.sinh(z), p * np.cosh(z)
        if self.kind == ClosedFormKind.COSH_AC:
            return np.cosh(z), p * np.sinh(z)
        e = np.exp(z)
        return e, p * e

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "param": self.param, "shift": self.shift}


def make_closed_form(form: ClosedForm, grid: Grid) -> GridFunction:
    """Sample a closed-form solution with its exact derivative"""
    values, derivs = form.evaluate(grid.x)
    return GridFunction(grid, values, derivs, energy=form.energy, exact=True)
