"""
Zero counting for complex-valued solutions.

A complex solution at a non-real energy has at most one zero on a closed
interval, while |u| can still dip close to zero. A dip only counts when the
straight line u + t u' through the nearest node passes within ZERO_TOL of the
origin, relative to the nearby magnitude of u.
"""
import numpy as np
from scipy.ndimage import maximum_filter1d

from classifier.models import ZeroReport
from core.grid import BoundaryProblem, GridFunction, crossing_nodes
from core.signature import endpoint_tolerance

ZERO_TOL = 1e-6
WINDOW = 8


def _vertex_offset(m_left: float, m_mid: float, m_right: float) -> float:
    """Offset in grid steps of the vertex of the parabola through three samples"""
    curvature = m_left - 2 * m_mid + m_right
    if curvature <= 0:
        return 0.0
    return float(np.clip(0.5 * (m_left - m_right) / curvature, -1.0, 1.0))


def count_zeros(u: GridFunction, problem: BoundaryProblem) -> ZeroReport:
    grid = u.grid
    f, df = u.values, u.derivs
    mags = np.abs(f)
    safe = np.where(np.isfinite(mags), mags, 0.0)
    local = maximum_filter1d(safe, size=2 * WINDOW + 1, mode="nearest")

    locations = []
    for i in crossing_nodes(f, window=WINDOW):
        if df[i] != 0:
            miss = abs((f[i] * np.conj(df[i])).imag) / abs(df[i])
        else:
            miss = mags[i]
        if miss > ZERO_TOL * local[i]:
            continue
        sq = mags[i - 1 : i + 2] ** 2
        x = grid.x[i] + _vertex_offset(*sq) * grid.h
        if problem.a < x < problem.b:
            locations.append(float(x))

    tol = endpoint_tolerance(u) * u.scale
    endpoints = {
        "left": bool(problem.left_is_finite and mags[0] <= tol),
        "right": bool(problem.right_is_finite and mags[-1] <= tol),
    }
    return ZeroReport(count=len(locations), locations=locations, endpoint_zeros=endpoints)
