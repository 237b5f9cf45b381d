"""
Case tables deciding reducibility and the spectrum of a second-order
transformation from the boundary behaviour of its transformation functions.

Finite intervals split by which endpoints u1 and u2 vanish at, the half
line by the behaviour of u2 once u1 vanishes at the origin, and the whole
line by the growth of both functions at the two infinities.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from classifier.models import CaseLabel, SeedSpectrum, SpectrumPrediction, Verdict
from classifier.symmetry import is_even, is_pt_symmetric
from classifier.zeros import count_zeros
from core.grid import BoundaryProblem, GridFunction, PotentialClass, ProblemKind, scattering_moment, zero_potential
from core.signature import Asymptotic, Signature, boundary_signature
from darboux.chain import ChainSplit, chain_split
from darboux.second_order import TransformationSpec, TransformResult, second_order_potential
from errors import InconsistentSpec, TransformError
from logger_config import logger
from settings import get_settings

REAL_TOL = 1e-12
COMPLEX_POTENTIAL_TOL = 1e-10


def is_real(z: complex) -> bool:
    z = complex(z)
    return abs(z.imag) <= REAL_TOL * (1 + abs(z))


def _conj_pair(a1: complex, a2: complex) -> bool:
    return abs(complex(a2) - complex(a1).conjugate()) <= 1e-10 * (1 + abs(complex(a1)))


def _fmt(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.6g}" if is_real(z) else f"{z.real:.6g}{z.imag:+.6g}i"


def is_complex_potential(V: GridFunction) -> bool:
    vals = V.values[np.isfinite(V.values)]
    if vals.size == 0:
        return False
    return bool(np.max(np.abs(vals.imag)) > COMPLEX_POTENTIAL_TOL * max(1.0, float(np.max(np.abs(vals)))))


@dataclass
class _Draft:
    """Mutable verdict under construction"""

    label: CaseLabel
    irreducible: bool = False
    real_spectrum: bool = True
    removed: List[complex] = field(default_factory=list)
    added: List[complex] = field(default_factory=list)
    complex_levels: List[complex] = field(default_factory=list)
    embedded: list = field(default_factory=list)
    singular: List[complex] = field(default_factory=list)
    isospectral: bool = False
    pt_eligible: Optional[bool] = None
    non_diagonalizable: bool = False
    notes: List[str] = field(default_factory=list)

    def new_level(self, alpha: complex, seed: SeedSpectrum):
        if is_real(alpha):
            alpha = complex(complex(alpha).real)
            self.added.append(alpha)
            if seed.in_continuum(alpha):
                self.embedded.append((alpha, True))
        else:
            self.complex_levels.append(complex(alpha))
            self.real_spectrum = False


class _Classifier:
    def __init__(self, spec: TransformationSpec, problem: BoundaryProblem,
                 seed: SeedSpectrum, V0: GridFunction, result: TransformResult):
        self.spec = spec
        self.problem = problem
        self.seed = seed
        self.V0 = V0
        self.result = result
        self._chain: Optional[ChainSplit] = None

    def sig(self, u: GridFunction) -> Signature:
        return boundary_signature(u, self.problem)

    def chain(self) -> ChainSplit:
        if self._chain is None:
            self._chain = chain_split(self.V0, self.spec, self.problem)
        return self._chain

    def nodes(self, u: GridFunction) -> int:
        return count_zeros(u, self.problem).count

    def eigen_index(self, u: GridFunction, alpha: complex, draft: _Draft) -> int:
        """Position of alpha in the seed spectrum for a function vanishing at both ends"""
        k = self.seed.index_of(alpha, get_settings().seed_level_tol)
        if k is not None:
            return k
        if not is_real(alpha):
            raise InconsistentSpec(
                "a function vanishing at both ends must sit at a real seed level",
                {"alpha": [complex(alpha).real, complex(alpha).imag]},
            )
        k = self.nodes(u)
        draft.notes.append(f"level {_fmt(alpha)} not in the supplied seed list; index {k} from its node count")
        return k

    # finite interval

    def finite_nonconfluent(self) -> _Draft:
        spec = self.spec
        s1, s2 = self.sig(spec.u1), self.sig(spec.u2)
        both1 = s1.vanishes_at_left and s1.vanishes_at_right
        both2 = s2.vanishes_at_left and s2.vanishes_at_right
        one1 = s1.vanishes_at_left != s1.vanishes_at_right
        one2 = s2.vanishes_at_left != s2.vanishes_at_right

        if both2 and not both1:
            self.spec = spec = spec.swapped()
            s1, s2, both1, both2, one1, one2 = s2, s1, both2, both1, one2, one1

        if both1 and both2:
            draft = _Draft(CaseLabel.FIN_A)
            k1 = self.eigen_index(spec.u1, spec.alpha1, draft)
            k2 = self.eigen_index(spec.u2, spec.alpha2, draft)
            draft.removed = [complex(spec.alpha1), complex(spec.alpha2)]
            draft.irreducible = min(k1, k2) > 0
            draft.notes.append(f"FIN_a: both functions are seed eigenfunctions (k={k1}, {k2}); V1 stays real")
            return draft

        if both1:
            draft = _Draft(CaseLabel.FIN_B if one2 else CaseLabel.FIN_C)
            k = self.eigen_index(spec.u1, spec.alpha1, draft)
            draft.removed = [complex(spec.alpha1)]
            draft.irreducible = k > 0
            draft.new_level(spec.alpha2, self.seed)
            if draft.label == CaseLabel.FIN_B:
                draft.notes.append(
                    f"FIN_b: u1 is eigenfunction k={k}; level {_fmt(spec.alpha2)} joins the spectrum; "
                    "a complex V1 needs complex alpha2 so the spectrum cannot stay real"
                )
            else:
                draft.notes.append(
                    f"FIN_c: u1 is eigenfunction k={k}; level {_fmt(spec.alpha1)} removed, "
                    f"level {_fmt(spec.alpha2)} added; irreducible provided k>0"
                )
                l = self.seed.index_of(spec.alpha2, get_settings().seed_level_tol)
                if is_real(spec.alpha2) and l is not None and l != k:
                    draft.non_diagonalizable = True
                    draft.notes.append(f"FIN_c: alpha2 hits seed level {l}; h1 becomes non-diagonalizable")
            return draft

        if one1 and one2 and s1.vanishes_at_left != s2.vanishes_at_left:
            draft = _Draft(CaseLabel.FIN_D, irreducible=True, isospectral=True)
            draft.pt_eligible = (self.problem.is_symmetric and is_pt_symmetric(self.V0)
                                 and _conj_pair(spec.alpha1, spec.alpha2))
            draft.notes.append("FIN_d: each first-order step breaks the boundary condition at one end; "
                               "h1 is strictly isospectral to h0")
            if is_real(spec.alpha1) and is_real(spec.alpha2):
                draft.notes.append("FIN_d: both constants real, V1 stays real")
            return draft

        raise InconsistentSpec(
            "endpoint zeros of u1 and u2 match no finite-interval case",
            {"u1": s1.to_dict(), "u2": s2.to_dict()},
        )

    def finite_confluent(self) -> _Draft:
        spec = self.spec
        s = self.sig(spec.u)
        if not (s.vanishes_at_left and s.vanishes_at_right):
            raise InconsistentSpec("confluent u must vanish at both ends of the interval", {"u": s.to_dict()})
        draft = _Draft(CaseLabel.FIN_CONFLUENT, isospectral=True)
        k = self.eigen_index(spec.u, spec.alpha, draft)
        draft.irreducible = k > 0
        c = complex(spec.c)
        draft.pt_eligible = (self.problem.is_symmetric and is_even(self.V0)
                             and abs(spec.x_anchor) <= 1e-12 and abs(c.real) <= REAL_TOL * (1 + abs(c)))
        draft.notes.append(f"FIN_confluent: u is eigenfunction k={k}; spectrum unchanged; irreducible provided k>0")
        if is_real(c):
            draft.notes.append("FIN_confluent: real c keeps V1 real")
        return draft

    # half line

    def half_line_nonconfluent(self) -> _Draft:
        spec = self.spec
        s1, s2 = self.sig(spec.u1), self.sig(spec.u2)
        if not s1.vanishes_at_left and s2.vanishes_at_left:
            self.spec = spec = spec.swapped()
            s1, s2 = s2, s1
        elif s1.vanishes_at_left and s2.vanishes_at_left and not is_real(spec.alpha1) and is_real(spec.alpha2):
            self.spec = spec = spec.swapped()
            s1, s2 = s2, s1
        if not s1.vanishes_at_left:
            raise InconsistentSpec("no transformation function vanishes at the origin",
                                   {"u1": s1.to_dict(), "u2": s2.to_dict()})

        a1, a2 = spec.alpha1, spec.alpha2
        nodes1 = self.nodes(spec.u1)
        base = is_real(a1) and nodes1 > 0

        if s2.vanishes_at_left:
            draft = _Draft(CaseLabel.HL_A)
            draft.irreducible = base and is_real(a2) and self.nodes(spec.u2) > 0
            draft.notes.append("HL_a: both functions vanish at the origin; images at alpha1, alpha2 are irregular there")
            if not is_real(a2):
                draft.notes.append("HL_a: complex alpha2 gives a complex V1 through a reducible chain")
        elif s2.right_asymptotic == Asymptotic.DECAYING:
            draft = _Draft(CaseLabel.HL_B)
            draft.irreducible = base and not is_real(a2)
            draft.notes.append("HL_b: phi at alpha2 grows at infinity; spectrum kept up to the point alpha1")
        elif s2.right_asymptotic == Asymptotic.GROWING:
            draft = _Draft(CaseLabel.HL_C)
            draft.irreducible = base
            draft.new_level(a2, self.seed)
            draft.notes.append(f"HL_c: phi at alpha2 is an eigenfunction; new level {_fmt(a2)}")
        else:
            draft = _Draft(CaseLabel.HL_D)
            draft.irreducible = base
            draft.singular.append(complex(a2))
            draft.notes.append(
                f"HL_d: alpha2={_fmt(a2)} stays in the continuum as a spectral singularity candidate; "
                "a truncated box cannot tell it from a removed point"
            )

        if s1.right_asymptotic == Asymptotic.DECAYING and is_real(a1):
            draft.removed.append(complex(complex(a1).real))
            draft.notes.append(f"u1 is a seed bound state; level {_fmt(a1)} removed")
        elif is_real(a1) and self.seed.in_continuum(a1):
            draft.notes.append(f"E={_fmt(a1)} may drop out of the continuum; flagged, not decided")
        if not is_real(a1):
            draft.notes.append("complex alpha1 makes u1 nodeless: the chain is reducible")
        elif nodes1 == 0:
            draft.notes.append("u1 is nodeless on the half line: the chain is reducible")
        return draft

    def half_line_confluent(self) -> _Draft:
        spec = self.spec
        s = self.sig(spec.u)
        if not s.vanishes_at_left:
            raise InconsistentSpec("confluent u must vanish at the origin", {"u": s.to_dict()})
        alpha = spec.alpha
        draft = _Draft(CaseLabel.HL_CONFLUENT)
        draft.irreducible = is_real(alpha) and self.nodes(spec.u) > 0
        if s.right_asymptotic == Asymptotic.DECAYING:
            draft.isospectral = True
            draft.notes.append("HL_confluent: u is a seed bound state; spectrum unchanged")
        else:
            draft.new_level(alpha, self.seed)
            if draft.embedded:
                draft.notes.append(
                    f"HL_confluent: level {_fmt(alpha)} embedded in the continuum; "
                    "V1 decays like 1/x^2 and is not a scattering potential"
                )
            else:
                draft.notes.append(f"HL_confluent: new level {_fmt(alpha)}")
        if is_real(spec.c):
            draft.notes.append("HL_confluent: real c keeps V1 real")
        return draft

    # whole line

    def whole_line_nonconfluent(self) -> _Draft:
        spec = self.spec
        draft = _Draft(CaseLabel.WL_NONCONFLUENT)
        sigs = [self.sig(spec.u1), self.sig(spec.u2)]
        alphas = [spec.alpha1, spec.alpha2]

        one_sided = [s.vanishes_at_left != s.vanishes_at_right for s in sigs]
        jost = (all(one_sided) and sigs[0].vanishes_at_left != sigs[1].vanishes_at_left
                and not is_real(alphas[0]) and not is_real(alphas[1]))
        if jost:
            draft.isospectral = True
            draft.pt_eligible = is_even(self.V0) and _conj_pair(alphas[0], alphas[1])
            draft.notes.append("WL: Jost pair decaying at opposite infinities; h1 isospectral to h0")
            return draft

        for s, alpha in zip(sigs, alphas):
            grows = s.left_asymptotic == Asymptotic.GROWING and s.right_asymptotic == Asymptotic.GROWING
            decays = s.vanishes_at_left and s.vanishes_at_right
            if grows:
                draft.new_level(alpha, self.seed)
            elif decays and is_real(alpha):
                draft.removed.append(complex(complex(alpha).real))
        if draft.complex_levels:
            draft.notes.append("WL: functions growing at both infinities with complex alpha give complex levels "
                               + ", ".join(_fmt(a) for a in draft.complex_levels))

        if draft.real_spectrum and is_complex_potential(self.result.V1):
            draft.notes.append("WL: a complex V1 with a real spectrum always splits into two regular first-order steps")
            return draft

        # a complex alpha with a one-sided tail is nodeless
        for s, alpha in zip(sigs, alphas):
            if not is_real(alpha) and s.vanishes_at_left != s.vanishes_at_right:
                draft.notes.append(f"WL: u at alpha={_fmt(alpha)} decays at one infinity, so it is nodeless "
                                   "and the chain reducible")
                return draft

        nodes = [self.nodes(u) for u in spec.functions]
        draft.irreducible = min(nodes) > 0 and not self.chain().splits
        if draft.irreducible:
            reason = "neither first-order ordering is regular"
        elif min(nodes) == 0:
            reason = "a nodeless function gives a regular first step"
        else:
            reason = "a first-order ordering stays regular"
        draft.notes.append(f"WL: u1, u2 have {nodes[0]} and {nodes[1]} nodes; {reason}")
        return draft

    def whole_line_confluent(self) -> _Draft:
        spec = self.spec
        s = self.sig(spec.u)
        alpha = spec.alpha
        draft = _Draft(CaseLabel.WL_CONFLUENT)
        draft.irreducible = is_real(alpha) and not is_real(spec.c)
        decays = s.vanishes_at_left and s.vanishes_at_right
        grows = s.left_asymptotic == Asymptotic.GROWING and s.right_asymptotic == Asymptotic.GROWING
        if is_real(alpha):
            if decays:
                draft.isospectral = True
            else:
                draft.new_level(alpha, self.seed)
            draft.notes.append(f"WL_confluent: phi at alpha={_fmt(alpha)} decays at both infinities")
        elif grows:
            draft.new_level(alpha, self.seed)
            draft.notes.append(f"WL_confluent: complex level {_fmt(alpha)}")
        else:
            draft.notes.append("WL_confluent: u decays at one infinity, so it is nodeless and the chain reducible")
        return draft

    def run(self) -> _Draft:
        kind = self.problem.kind
        confluent = self.spec.is_confluent
        if kind == ProblemKind.FINITE_INTERVAL:
            return self.finite_confluent() if confluent else self.finite_nonconfluent()
        if kind == ProblemKind.HALF_LINE:
            return self.half_line_confluent() if confluent else self.half_line_nonconfluent()
        return self.whole_line_confluent() if confluent else self.whole_line_nonconfluent()


def _default_seed(spec: TransformationSpec, problem: BoundaryProblem, V0: GridFunction) -> SeedSpectrum:
    if np.any(V0.values != 0):
        return SeedSpectrum(description="not supplied")
    top = max(abs(complex(a)) for a in spec.constants)
    count = 12
    if problem.kind == ProblemKind.FINITE_INTERVAL:
        count = max(count, int(math.ceil(math.sqrt(top) * (problem.b - problem.a) / math.pi)) + 4)
    return SeedSpectrum.free(problem, count)


def classify(
    spec: TransformationSpec,
    problem: BoundaryProblem,
    seed: Optional[SeedSpectrum] = None,
    V0: Optional[GridFunction] = None,
) -> Verdict:
    """Case label, reducibility and predicted spectrum of a transformation"""
    if not problem.grid(spec.grid.n).matches(spec.grid):
        raise TransformError("transformation functions do not live on the problem grid",
                             {"problem": problem.to_dict(), "n": spec.grid.n})
    V0 = V0 if V0 is not None else zero_potential(spec.grid)
    seed = seed if seed is not None else _default_seed(spec, problem, V0)
    result = second_order_potential(V0, spec)

    worker = _Classifier(spec, problem, seed, V0, result)
    draft = worker.run()

    complex_v1 = is_complex_potential(result.V1)
    if draft.pt_eligible is None:
        draft.pt_eligible = problem.is_symmetric and complex_v1 and is_pt_symmetric(result.V1)
    if not result.regular:
        draft.notes.append("W vanishes inside the domain: V1 is singular at x = "
                           + ", ".join(f"{x:.6g}" for x in result.singular_x))
    if problem.kind == ProblemKind.HALF_LINE and problem.potential_class == PotentialClass.SCATTERING:
        draft.notes.append(f"scattering moment proxy of V0: {scattering_moment(V0, problem):.6g}")

    split = worker.chain()
    draft.notes.extend(split.notes())
    if split.splits and draft.irreducible:
        draft.notes.append("chain split found a splitting the case table does not admit")

    prediction = SpectrumPrediction(
        base=seed.description,
        base_levels=seed.levels,
        continuum_start=seed.continuum_start,
        removed=[] if draft.isospectral else draft.removed,
        added=[] if draft.isospectral else draft.added,
        complex_levels=[] if draft.isospectral else draft.complex_levels,
        embedded_flags=draft.embedded,
        spectral_singularity_candidates=draft.singular,
        isospectral=draft.isospectral,
    )
    verdict = Verdict(
        problem_kind=problem.kind,
        potential_class=problem.potential_class,
        case_label=draft.label,
        irreducible=draft.irreducible,
        real_spectrum=draft.real_spectrum,
        complex_potential=complex_v1,
        prediction=prediction,
        pt_eligible=bool(draft.pt_eligible),
        non_diagonalizable=draft.non_diagonalizable,
        notes=draft.notes,
    )
    logger.info("spec_classified", case=verdict.case_label.value, irreducible=verdict.irreducible,
                real_spectrum=verdict.real_spectrum, complex_potential=complex_v1)
    return verdict
