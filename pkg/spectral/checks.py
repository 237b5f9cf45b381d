"""
Consistency checks on transformed potentials and their solutions.
"""
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from classifier.models import SeedSpectrum
from core.grid import BoundaryProblem, GridFunction, PotentialClass, ProblemKind
from core.integrator import schrodinger_residual, solve_ivp
from darboux.second_order import TransformResult, second_order_map
from errors import AmbiguousAsymptotics
from logger_config import logger
from spectral.report import compute_spectrum

MIN_BLOCKS = 4
EXPONENT_DEAD_BAND = 0.05
SUBLINEAR_RATIO = 0.9


def intertwining_residual(V0: GridFunction, result: TransformResult, E_samples: Iterable[complex]) -> float:
    """Max residual of (h1 - E) applied to images of seed solutions"""
    grid = V0.grid
    centre = float(grid.x[grid.n // 2])
    worst = 0.0
    for E in E_samples:
        E = complex(E)
        psi = solve_ivp(V0, E, centre, 1.0, 0.5 + 0.5j)
        phi = second_order_map(psi, E, result.spec, result.W, on_kernel="zero")
        if phi.scale == 0.0:
            continue
        phi = phi.scaled(1.0 / phi.scale)
        res = schrodinger_residual(phi, result.V1, E)
        logger.debug("intertwining_sample", energy=str(E), residual=res)
        worst = max(worst, res)
    return worst


@dataclass(frozen=True)
class TailFit:
    """Outcome of a square-integrability test on a truncated tail"""

    square_integrable: bool
    exponent: float
    sublinear: bool

    def __bool__(self) -> bool:
        return self.square_integrable

    def to_dict(self) -> dict:
        return {"square_integrable": self.square_integrable, "exponent": self.exponent,
                "sublinear": self.sublinear}


def _tail_fit(x: np.ndarray, f: np.ndarray, h: float) -> TailFit:
    """x runs outwards with |x| increasing"""
    f = np.where(np.isfinite(f), f, 0.0)
    mag = np.abs(f)
    dist = np.abs(x)

    changes = int(np.count_nonzero(np.diff(np.signbit(f.real))))
    blocks = max(MIN_BLOCKS, changes // 2)
    peaks_x, peaks = [], []
    for chunk in np.array_split(np.arange(x.size), blocks):
        if chunk.size == 0:
            continue
        j = chunk[np.argmax(mag[chunk])]
        if mag[j] > 0.0:
            peaks_x.append(dist[j])
            peaks.append(mag[j])
    if len(peaks) < 3:
        raise AmbiguousAsymptotics("too few nonzero blocks in the tail", {"blocks": len(peaks)})

    slope, _ = np.polyfit(np.log(peaks_x), np.log(peaks), 1)
    p = float(-slope)
    if abs(p - 0.5) < EXPONENT_DEAD_BAND:
        raise AmbiguousAsymptotics("tail decays like the borderline 1/sqrt(x)", {"exponent": p})

    acc = cumulative_simpson(mag ** 2, dx=h, initial=0.0)
    half = x.size // 2
    first, last = acc[half] - acc[0], acc[-1] - acc[half]
    sublinear = bool(last < SUBLINEAR_RATIO * first) if first > 0 else bool(last == 0.0)
    return TailFit(square_integrable=p > 0.5 and sublinear, exponent=p, sublinear=sublinear)


def l2_tail_check(phi: GridFunction, problem: BoundaryProblem) -> TailFit:
    """Whether phi is square integrable at the truncated infinities.

    The outer half of each unbounded side is cut into blocks, one per
    oscillation period or at least four; block maxima of |phi| are fitted to
    C/|x|^p in log-log scale and the accumulated norm has to level off.
    """
    if problem.kind == ProblemKind.FINITE_INTERVAL:
        raise ValueError("l2_tail_check needs an unbounded problem")
    x, f, h = phi.x, phi.values, phi.grid.h

    right = x >= problem.b / 2
    fits = [_tail_fit(x[right], f[right], h)]
    if problem.kind == ProblemKind.WHOLE_LINE:
        left = x <= problem.a / 2
        fits.append(_tail_fit(x[left][::-1], f[left][::-1], h))

    result = TailFit(
        square_integrable=all(fit.square_integrable for fit in fits),
        exponent=min(fit.exponent for fit in fits),
        sublinear=all(fit.sublinear for fit in fits),
    )
    logger.debug("tail_checked", **result.to_dict())
    return result


@dataclass(frozen=True)
class LevelStability:
    stable: List[complex]
    unstable: List[complex]
    L: Optional[float]

    def to_dict(self) -> dict:
        return {"stable": self.stable, "unstable": self.unstable, "L": self.L}


def stable_levels(build_potential: Callable[[BoundaryProblem], GridFunction], problem: BoundaryProblem,
                  k: int, tol: float, n: int) -> LevelStability:
    """Split the k lowest levels into those that survive doubling L and those that move.

    ``build_potential`` evaluates the potential for a given truncation; the
    doubled box is discretized with 2n nodes so the spacing stays the same.
    """
    if problem.kind == ProblemKind.FINITE_INTERVAL:
        levels = compute_spectrum(build_potential(problem), problem, k, n).eigenvalues
        return LevelStability(stable=levels, unstable=[], L=None)

    wide = problem.with_truncation(2 * problem.L)
    base = compute_spectrum(build_potential(problem), problem, k, n).eigenvalues
    # the doubled box holds about twice as many box states below a given energy
    doubled = compute_spectrum(build_potential(wide), wide, 2 * k + 2, 2 * n).eigenvalues

    stable, unstable = [], []
    for E in base:
        if doubled and min(abs(E - D) for D in doubled) <= tol:
            stable.append(E)
        else:
            unstable.append(E)
    if unstable:
        logger.warning("levels_unstable", L=problem.L, moved=[str(E) for E in unstable])
    return LevelStability(stable=stable, unstable=unstable, L=problem.L)


def seed_levels(V0: GridFunction, problem: BoundaryProblem, k: int, n: int) -> SeedSpectrum:
    """Lowest discrete seed levels computed numerically.

    For scattering seeds on unbounded domains only levels below the
    continuum edge at 0 are kept; everything above is a box state.
    """
    levels = compute_spectrum(V0, problem, k, n).eigenvalues
    scattering = problem.kind != ProblemKind.FINITE_INTERVAL and problem.potential_class == PotentialClass.SCATTERING
    if scattering:
        levels = [E for E in levels if E.real < 0]
        return SeedSpectrum(levels=levels, continuum_start=0.0,
                            description=f"{len(levels)} computed bound state(s), continuum E>=0")
    return SeedSpectrum(levels=levels, description=f"{len(levels)} computed level(s)")
