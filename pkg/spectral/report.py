"""
Computed spectra and their comparison against a predicted spectrum.
"""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from classifier.models import SpectrumPrediction
from core.grid import BoundaryProblem, GridFunction
from errors import NoConvergence, SolutionOverflow
from logger_config import logger
from spectral.operator import discretize
from spectral.qr import eig_complex_tridiagonal, sort_spectrum
from spectral.shooting import refine_eigenvalue, shoot_mismatch


class MatchedPair(BaseModel):
    expected: complex
    found: complex
    error: float


class SpectrumReport(BaseModel):
    eigenvalues: List[complex] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list)
    matched: List[MatchedPair] = Field(default_factory=list)
    unmatched_expected: List[complex] = Field(default_factory=list)
    unmatched_found: List[complex] = Field(default_factory=list)
    real_spectrum: bool = True
    tol: float = 1e-3
    strict: bool = True
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.unmatched_expected:
            return False
        return not (self.strict and self.unmatched_found)


class ComputedSpectrum(BaseModel):
    """Lowest eigenvalues of a discretized potential, refined by shooting"""

    eigenvalues: List[complex]
    qr_values: List[complex]
    residuals: List[float]
    refined: List[bool]
    discretization_bound: List[float]
    n: int
    h: float


def compute_spectrum(V: GridFunction, problem: BoundaryProblem, k: int, n: int,
                     refine: bool = True) -> ComputedSpectrum:
    """k lowest-real-part eigenvalues; shooting refinement falls back to the QR value"""
    T = discretize(V, problem, n)
    low = eig_complex_tridiagonal(T)[:k]

    energies, residuals, refined, bounds = [], [], [], []
    for E in low:
        # leading truncation error of the three-point stencil
        bound = T.h ** 2 * abs(E) ** 2 / 12.0 + T.h ** 2 * float(np.max(np.abs(T.diag - 2 / T.h ** 2))) * abs(E) / 12.0
        value, ok = complex(E), False
        if refine:
            try:
                level = refine_eigenvalue(V, E, problem)
                if abs(level.energy - E) <= max(10 * bound, 1e-8):
                    value, ok = level.energy, True
                else:
                    logger.warning("refinement_drifted", qr=str(E), shot=str(level.energy))
            except (NoConvergence, SolutionOverflow) as e:
                logger.warning("refinement_failed", qr=str(E), error=str(e))
        try:
            residual = abs(shoot_mismatch(V, value, problem))
        except SolutionOverflow:
            residual = float("nan")
        energies.append(value)
        residuals.append(residual)
        refined.append(ok)
        bounds.append(bound)

    order = np.lexsort((np.imag(energies), np.real(energies))) if energies else []

    def pick(seq):
        return [seq[i] for i in order]

    logger.info("spectrum_computed", n=n, k=k, refined=int(sum(refined)))
    return ComputedSpectrum(
        eigenvalues=pick(energies),
        qr_values=[complex(v) for v in low],
        residuals=pick(residuals),
        refined=pick(refined),
        discretization_bound=pick(bounds),
        n=n,
        h=T.h,
    )


def _greedy_pairs(expected: List[complex], found: List[complex], tol: float) -> List[Tuple[int, int, float]]:
    if not expected or not found:
        return []
    dist = np.abs(np.asarray(expected)[:, None] - np.asarray(found)[None, :])
    pairs = []
    used_e, used_f = set(), set()
    for flat in np.argsort(dist, axis=None):
        i, j = np.unravel_index(flat, dist.shape)
        if dist[i, j] > tol:
            break
        if i in used_e or j in used_f:
            continue
        used_e.add(i)
        used_f.add(j)
        pairs.append((int(i), int(j), float(dist[i, j])))
    return pairs


def compare_spectra(found, prediction: SpectrumPrediction, k: int, tol: float,
                    residuals: Optional[List[float]] = None) -> SpectrumReport:
    """Greedy nearest-neighbour matching of the k lowest eigenvalues to the prediction.

    Levels flagged as embedded in the continuum sit among box states of a
    truncated domain and are left to a direct shooting check.
    """
    lowest = [complex(v) for v in sort_spectrum(found)[:k]]
    embedded = [complex(e) for e, flag in prediction.embedded_flags if flag]
    expected = [e for e in prediction.expected_levels() if not any(abs(e - m) <= tol for m in embedded)][:k]
    pairs = _greedy_pairs(expected, lowest, tol)

    matched = [MatchedPair(expected=expected[i], found=lowest[j], error=err) for i, j, err in pairs]
    hit_e = {i for i, _, _ in pairs}
    hit_f = {j for _, j, _ in pairs}
    real = all(abs(m.found.imag) <= tol for m in matched)

    report = SpectrumReport(
        eigenvalues=lowest,
        residuals=list(residuals[:k]) if residuals is not None else [],
        matched=matched,
        unmatched_expected=[e for i, e in enumerate(expected) if i not in hit_e],
        unmatched_found=[f for j, f in enumerate(lowest) if j not in hit_f],
        real_spectrum=real,
        tol=tol,
        strict=prediction.continuum_start is None and len(expected) >= len(lowest),
    )
    if embedded:
        report.notes.append("embedded levels left out of the matching: " + ", ".join(str(e) for e in embedded))
    if prediction.spectral_singularity_candidates:
        report.notes.append("spectral singularity candidates are not visible in a truncated box")
    logger.info("spectra_compared", matched=len(matched), missing=len(report.unmatched_expected),
                extra=len(report.unmatched_found), passed=report.passed)
    return report
