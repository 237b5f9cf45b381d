"""
Result models of the irreducibility classifier.
"""
import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from core.grid import BoundaryProblem, PotentialClass, ProblemKind

LEVEL_MATCH = 1e-6


class CaseLabel(str, Enum):
    FIN_A = "FIN_a"
    FIN_B = "FIN_b"
    FIN_C = "FIN_c"
    FIN_D = "FIN_d"
    FIN_CONFLUENT = "FIN_confluent"
    HL_A = "HL_a"
    HL_B = "HL_b"
    HL_C = "HL_c"
    HL_D = "HL_d"
    HL_CONFLUENT = "HL_confluent"
    WL_NONCONFLUENT = "WL_nonconfluent"
    WL_CONFLUENT = "WL_confluent"


def _close(a: complex, b: complex, tol: float = LEVEL_MATCH) -> bool:
    return abs(complex(a) - complex(b)) <= tol * (1 + abs(complex(b)))


def _by_real_part(levels) -> List[complex]:
    return sorted((complex(e) for e in levels), key=lambda e: (e.real, e.imag))


class ZeroReport(BaseModel):
    count: int
    locations: List[float] = Field(default_factory=list)
    endpoint_zeros: Dict[str, bool] = Field(default_factory=lambda: {"left": False, "right": False})

    @model_validator(mode="after")
    def _count_matches(self):
        if self.count != len(self.locations):
            raise ValueError("count must equal the number of locations")
        return self

    @property
    def total(self) -> int:
        """Zeros on the closed interval, endpoints included"""
        return self.count + sum(bool(v) for v in self.endpoint_zeros.values())


class SeedSpectrum(BaseModel):
    """Known part of the seed spectrum: lowest discrete levels and the continuum edge"""

    levels: List[complex] = Field(default_factory=list)
    continuum_start: Optional[float] = None
    description: str = ""

    @classmethod
    def free(cls, problem: BoundaryProblem, count: int = 12) -> "SeedSpectrum":
        if problem.kind == ProblemKind.FINITE_INTERVAL:
            width = problem.b - problem.a
            levels = [complex((n * math.pi / width) ** 2) for n in range(1, count + 1)]
            return cls(levels=levels, description=f"(n*pi/{width:.12g})^2, n>=1")
        return cls(continuum_start=0.0, description="continuum E>=0, no discrete levels")

    @classmethod
    def harmonic(cls, omega: float = 1.0, count: int = 12) -> "SeedSpectrum":
        return cls(levels=[complex(omega * (2 * n + 1)) for n in range(count)],
                   description=f"{omega:.12g}*(2n+1), n>=0")

    def index_of(self, alpha: complex, tol: float = LEVEL_MATCH) -> Optional[int]:
        for k, level in enumerate(self.levels):
            if _close(alpha, level, tol):
                return k
        return None

    def in_continuum(self, alpha: complex) -> bool:
        alpha = complex(alpha)
        return (self.continuum_start is not None and abs(alpha.imag) <= 1e-12 * (1 + abs(alpha))
                and alpha.real >= self.continuum_start)


class SpectrumPrediction(BaseModel):
    base: str
    base_levels: List[complex] = Field(default_factory=list)
    continuum_start: Optional[float] = None
    removed: List[complex] = Field(default_factory=list)
    added: List[complex] = Field(default_factory=list)
    complex_levels: List[complex] = Field(default_factory=list)
    embedded_flags: List[Tuple[complex, bool]] = Field(default_factory=list)
    spectral_singularity_candidates: List[complex] = Field(default_factory=list)
    isospectral: bool = False

    @model_validator(mode="after")
    def _consistent(self):
        if self.isospectral and (self.removed or self.added or self.complex_levels):
            raise ValueError("an isospectral prediction cannot remove or add levels")
        if self.base_levels:
            top = max(e.real for e in self.base_levels)
            for level in self.removed:
                discrete = self.continuum_start is None or level.real < self.continuum_start
                if discrete and level.real <= top and not any(_close(level, e) for e in self.base_levels):
                    raise ValueError(f"removed level {level} is not a seed level")
        return self

    def expected_levels(self, k: Optional[int] = None) -> List[complex]:
        """Predicted discrete levels ordered by real part"""
        kept = [e for e in self.base_levels if not any(_close(e, r) for r in self.removed)]
        levels = _by_real_part(kept + list(self.added) + list(self.complex_levels))
        return levels if k is None else levels[:k]


class Verdict(BaseModel):
    problem_kind: ProblemKind
    potential_class: PotentialClass = PotentialClass.GENERIC
    case_label: CaseLabel
    irreducible: bool
    real_spectrum: bool
    complex_potential: bool
    prediction: SpectrumPrediction
    pt_eligible: bool
    non_diagonalizable: bool = False
    notes: List[str] = Field(default_factory=list)

    def agrees_with(self, other: "Verdict") -> bool:
        return (self.case_label == other.case_label
                and self.irreducible == other.irreducible
                and self.real_spectrum == other.real_spectrum)
