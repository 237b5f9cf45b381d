"""
Boundary behaviour of a solution: vanishing at finite endpoints and the
asymptotic class at truncated infinities.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.grid import BoundaryProblem, GridFunction
from errors import AmbiguousAsymptotics
from settings import get_settings

TAIL_FRACTION = 0.1
# wider windows catch oscillations slower than the outer tenth of the grid
OSCILLATION_FRACTIONS = (0.1, 0.2, 0.3)
DEAD_BAND = 0.05
MONOTONE_FRACTION = 0.98


class Asymptotic(str, Enum):
    DECAYING = "Decaying"
    GROWING = "Growing"
    OSCILLATING = "Oscillating"


@dataclass(frozen=True)
class Signature:
    vanishes_at_left: bool
    vanishes_at_right: bool
    left_asymptotic: Optional[Asymptotic] = None
    right_asymptotic: Optional[Asymptotic] = None

    def to_dict(self) -> dict:
        return {
            "vanishes_at_left": self.vanishes_at_left,
            "vanishes_at_right": self.vanishes_at_right,
            "left_asymptotic": self.left_asymptotic.value if self.left_asymptotic else None,
            "right_asymptotic": self.right_asymptotic.value if self.right_asymptotic else None,
        }


def endpoint_tolerance(u: GridFunction) -> float:
    settings = get_settings()
    return settings.closed_form_endpoint_tol if u.exact else settings.integrated_endpoint_tol


def _is_monotone(m: np.ndarray) -> bool:
    steps = np.diff(m)
    return max(np.mean(steps > 0), np.mean(steps < 0)) >= MONOTONE_FRACTION


def tail_class(side: np.ndarray) -> Asymptotic:
    """Classify |u| along one side of the grid, ordered from the inside outwards"""
    side = np.asarray(side, dtype=float)
    for fraction in OSCILLATION_FRACTIONS:
        width = max(3, int(round(fraction * side.size)))
        if not _is_monotone(side[-width:]):
            return Asymptotic.OSCILLATING

    m = side[-max(3, int(round(TAIL_FRACTION * side.size))):]
    third = max(1, m.size // 3)
    inner = np.mean(m[:third])
    outer = np.mean(m[-third:])
    if inner == 0.0:
        raise AmbiguousAsymptotics("tail starts at zero magnitude")
    ratio = outer / inner
    if ratio > 1 + DEAD_BAND:
        return Asymptotic.GROWING
    if ratio < 1 - DEAD_BAND:
        return Asymptotic.DECAYING
    raise AmbiguousAsymptotics(
        "tail growth ratio inside the dead band; enlarge the truncation L",
        {"ratio": float(ratio)},
    )


def boundary_signature(u: GridFunction, problem: BoundaryProblem) -> Signature:
    """Vanishing flags and tail classes of u for the given problem"""
    mags = np.abs(u.values)
    top = float(np.max(mags[np.isfinite(mags)]))
    tol = endpoint_tolerance(u) * top

    left_asym = right_asym = None
    if problem.left_is_finite:
        vanish_left = bool(mags[0] <= tol)
    else:
        left_asym = tail_class(mags[::-1])
        vanish_left = left_asym == Asymptotic.DECAYING

    if problem.right_is_finite:
        vanish_right = bool(mags[-1] <= tol)
    else:
        right_asym = tail_class(mags)
        vanish_right = right_asym == Asymptotic.DECAYING

    return Signature(vanish_left, vanish_right, left_asym, right_asym)
