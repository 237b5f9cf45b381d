"""
Catalog of worked examples with closed-form partner potentials.

Every example starts from V0 = 0. Parameters come from fixtures.json unless
overridden; each example checks its parameter constraints before building
anything and raises ConstraintViolation naming the failed predicate.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from classifier.models import CaseLabel, SeedSpectrum, SpectrumPrediction, Verdict
from core.closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from core.grid import BoundaryProblem, Grid, GridFunction, PotentialClass, zero_potential
from core.serialize import parse_complex, read_json
from darboux.second_order import TransformationSpec
from errors import ConfigError, ConstraintViolation
from logger_config import logger
from settings import get_settings

FIXTURES = Path(__file__).with_name("fixtures.json")
REAL = 1e-12

Params = Dict[str, complex]


class Constraint(NamedTuple):
    name: str
    check: Callable[[Params], bool]


class ExampleRun(NamedTuple):
    spec: TransformationSpec
    closed_form: Optional[GridFunction]
    expected: Verdict
    problem: BoundaryProblem
    params: Params


@dataclass(frozen=True)
class ExampleCase:
    id: str
    summary: str
    problem: Callable[[Params], BoundaryProblem]
    transformation: Callable[[Grid, Params], TransformationSpec]
    closed_form: Optional[Callable[[np.ndarray, Params], np.ndarray]]
    prediction: Callable[[Params], dict]
    constraints: Tuple[Constraint, ...]

    def violated(self, params: Params) -> List[str]:
        return [c.name for c in self.constraints if not c.check(params)]


def _real(z: complex) -> bool:
    return abs(complex(z).imag) <= REAL * (1 + abs(complex(z)))


def _int(z: complex) -> int:
    return int(round(complex(z).real))


def _is_int(z: complex) -> bool:
    return _real(z) and abs(complex(z).real - _int(z)) <= 1e-12


def _form(grid: Grid, kind: ClosedFormKind, param: complex, shift: complex = 0j) -> GridFunction:
    return make_closed_form(ClosedForm(kind, complex(param), complex(shift)), grid)


def _on_interval(params: Params) -> BoundaryProblem:
    return BoundaryProblem.finite(-math.pi, math.pi)


def _half_line(params: Params) -> BoundaryProblem:
    return BoundaryProblem.half_line(params["L"].real, PotentialClass.SCATTERING)


def _whole_line(params: Params) -> BoundaryProblem:
    return BoundaryProblem.whole_line(params["L"].real, PotentialClass.SCATTERING)


# elementwise on complex arguments
cos, sin, cosh, sinh = np.cos, np.sin, np.cosh, np.sinh


def _v1_cos_b(x, p):
    n0, a, b = p["n0"].real, p["a"], p["b"]
    num = n0 ** 2 * (cos(2 * a * x + 2 * b) + 1) + a ** 2 * (cos(2 * n0 * x) - 1)
    den = n0 * cos(n0 * x) * cos(a * x + b) + a * sin(n0 * x) * sin(a * x + b)
    return (n0 ** 2 - a ** 2) * num / den ** 2


def _v1_opposite_ends(x, p):
    a1, a2 = p["a1"], p["a2"]
    s1, s2 = a1 * (x + math.pi), a2 * (x - math.pi)
    num = a2 ** 2 * (1 - cos(2 * s1)) - a1 ** 2 * (1 - cos(2 * s2))
    den = a1 * cos(s1) * sin(s2) - a2 * cos(s2) * sin(s1)
    return (a2 ** 2 - a1 ** 2) * num / den ** 2


def _v1_confluent_box(sign: int):
    def v1(x, p):
        n0, c = p["n0"].real, p["c"]
        y = n0 * (2 * c + x)
        num = y * sin(n0 * x) + 2 * cos(n0 * x) + 2 * sign
        return sign * 2 * n0 ** 2 * num / (sin(n0 * x) + sign * y) ** 2
    return v1


def _v1_sinh(x, p):
    k0, a = p["k0"].real, p["a"]
    num = k0 ** 2 * (cosh(2 * a * x) - 1) + a ** 2 * (cos(2 * k0 * x) - 1)
    den = k0 * cos(k0 * x) * sinh(a * x) - a * sin(k0 * x) * cosh(a * x)
    return (k0 ** 2 + a ** 2) * num / den ** 2


def _v1_exp(x, p):
    k0, a = p["k0"].real, p["a"]
    return 2 * k0 ** 2 * (k0 ** 2 + a ** 2) / (k0 * cos(k0 * x) - a * sin(k0 * x)) ** 2


def _v1_cosh(x, p):
    k0, a, c = p["k0"].real, p["a"].real, p["c"]
    z = a * x + c
    num = a ** 2 * (1 - cos(2 * k0 * x)) + k0 ** 2 * (1 + cosh(2 * z))
    den = k0 * cos(k0 * x) * cosh(z) - a * sin(k0 * x) * sinh(z)
    return (k0 ** 2 + a ** 2) * num / den ** 2


def _v1_embedded(x, p):
    k0, c = p["k0"].real, p["c"]
    s, co = sin(k0 * x), cos(k0 * x)
    return 32 * k0 ** 2 * s * (s - k0 * (x + c) * co) / (sin(2 * k0 * x) - 2 * k0 * (x + c)) ** 2


def _v1_sinh_pair(x, p):
    a1, a2, x1, x2 = p["a1"], p["a2"], p["x1"].real, p["x2"].real
    s1, s2 = a1 * (x - x1), a2 * (x - x2)
    num = a2 ** 2 * (1 - cosh(2 * s1)) - a1 ** 2 * (1 - cosh(2 * s2))
    den = a2 * cosh(s2) * sinh(s1) - a1 * cosh(s1) * sinh(s2)
    return (a2 ** 2 - a1 ** 2) * num / den ** 2


def _v1_oscillating(x, p):
    k0, k1, c = p["k0"].real, p["k1"].real, p["c"]
    num = k1 ** 2 * (1 - cos(2 * k0 * x)) - k0 ** 2 * (1 - cos(2 * k1 * x + 2 * c))
    den = k0 * cos(k0 * x) * sin(k1 * x + c) - k1 * sin(k0 * x) * cos(k1 * x + c)
    return (k1 ** 2 - k0 ** 2) * num / den ** 2


def _constraints(*pairs) -> Tuple[Constraint, ...]:
    return tuple(Constraint(name, check) for name, check in pairs)


def _not_half_integer(z: complex) -> bool:
    twice = 2 * complex(z).real
    return not (abs(twice - round(twice)) <= 1e-12 and round(twice) != 0)


def _origin(case_id: str, params: Params) -> dict:
    return {"example": case_id, "params": dict(params)}


EXAMPLES: Dict[str, ExampleCase] = {
    "1": ExampleCase(
        id="1",
        summary="finite interval, eigenfunction sin(n0 x) with cos(a x + b): level n0^2 replaced by a^2",
        problem=_on_interval,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["n0"].real), _form(g, ClosedFormKind.COS_KC, p["a"], p["b"]),
            origin=_origin("1", p)),
        closed_form=_v1_cos_b,
        prediction=lambda p: {"removed": [p["n0"].real ** 2], "added": [p["a"].real ** 2]},
        constraints=_constraints(
            ("n0 is a positive integer", lambda p: _is_int(p["n0"]) and _int(p["n0"]) >= 1),
            ("a is real", lambda p: _real(p["a"])),
            ("a != n0", lambda p: abs(p["a"] - p["n0"]) > 1e-12),
            ("a != n/2", lambda p: _not_half_integer(p["a"])),
            ("Im(b) != 0", lambda p: not _real(p["b"])),
        ),
    ),
    "2": ExampleCase(
        id="2",
        summary="finite interval, functions vanishing at opposite ends with complex constants: isospectral",
        problem=_on_interval,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["a1"], p["a1"] * math.pi),
            _form(g, ClosedFormKind.SIN_K, p["a2"], -p["a2"] * math.pi),
            origin=_origin("2", p)),
        closed_form=_v1_opposite_ends,
        prediction=lambda p: {"isospectral": True},
        constraints=_constraints(
            ("a1 != a2", lambda p: abs(p["a1"] - p["a2"]) > 1e-12),
            ("Im(a1^2) != 0", lambda p: not _real(p["a1"] ** 2)),
            ("Im(a2^2) != 0", lambda p: not _real(p["a2"] ** 2)),
        ),
    ),
    "3": ExampleCase(
        id="3",
        summary="finite interval, confluent on cos(n0 x / 2) with complex c: isospectral",
        problem=_on_interval,
        transformation=lambda g, p: TransformationSpec.confluent(
            _form(g, ClosedFormKind.COS_KC, p["n0"].real / 2), p["c"], 0.0, origin=_origin("3", p)),
        closed_form=_v1_confluent_box(+1),
        prediction=lambda p: {"isospectral": True},
        constraints=_constraints(
            ("n0 is an odd integer >= 3", lambda p: _is_int(p["n0"]) and _int(p["n0"]) >= 3 and _int(p["n0"]) % 2 == 1),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
    "3b": ExampleCase(
        id="3b",
        summary="finite interval, confluent on sin(n0 x / 2) with complex c: isospectral",
        problem=_on_interval,
        transformation=lambda g, p: TransformationSpec.confluent(
            _form(g, ClosedFormKind.SIN_K, p["n0"].real / 2), p["c"], 0.0, origin=_origin("3b", p)),
        closed_form=_v1_confluent_box(-1),
        prediction=lambda p: {"isospectral": True},
        constraints=_constraints(
            ("n0 is an even integer >= 4", lambda p: _is_int(p["n0"]) and _int(p["n0"]) >= 4 and _int(p["n0"]) % 2 == 0),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
    "4": ExampleCase(
        id="4",
        summary="half line, sin(k0 x) with sinh(a x): both vanish at the origin, V1 singular there",
        problem=_half_line,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), _form(g, ClosedFormKind.SINH_A, p["a"]),
            origin=_origin("4", p)),
        closed_form=_v1_sinh,
        prediction=lambda p: {},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("Im(a^2) != 0", lambda p: not _real(p["a"] ** 2)),
        ),
    ),
    "5": ExampleCase(
        id="5",
        summary="half line, sin(k0 x) with decaying exp(a x): real spectrum, irreducible",
        problem=_half_line,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), _form(g, ClosedFormKind.EXP_A, p["a"]),
            origin=_origin("5", p)),
        closed_form=_v1_exp,
        prediction=lambda p: {},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("Re(a) < 0", lambda p: p["a"].real < 0),
            ("Im(a^2) != 0", lambda p: not _real(p["a"] ** 2)),
        ),
    ),
    "6": ExampleCase(
        id="6",
        summary="half line, sin(k0 x) with growing cosh(a x + c): new level -a^2",
        problem=_half_line,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), _form(g, ClosedFormKind.COSH_AC, p["a"].real, p["c"]),
            origin=_origin("6", p)),
        closed_form=_v1_cosh,
        prediction=lambda p: {"added": [-p["a"].real ** 2]},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("a > 0 real", lambda p: _real(p["a"]) and p["a"].real > 0),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
    "7": ExampleCase(
        id="7",
        summary="half line, confluent on sin(k0 x): level k0^2 embedded in the continuum",
        problem=_half_line,
        transformation=lambda g, p: TransformationSpec.confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), p["c"] / 2, 0.0, origin=_origin("7", p)),
        closed_form=_v1_embedded,
        prediction=lambda p: {"added": [p["k0"].real ** 2], "embedded": [p["k0"].real ** 2]},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
    "8": ExampleCase(
        id="8",
        summary="whole line, two growing sinh functions: complex levels -a1^2, -a2^2",
        problem=_whole_line,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SINH_A, p["a1"], -p["a1"] * p["x1"].real),
            _form(g, ClosedFormKind.SINH_A, p["a2"], -p["a2"] * p["x2"].real),
            origin=_origin("8", p)),
        closed_form=_v1_sinh_pair,
        prediction=lambda p: {"complex": [-p["a1"] ** 2, -p["a2"] ** 2]},
        constraints=_constraints(
            ("a1 != a2", lambda p: abs(p["a1"] - p["a2"]) > 1e-12),
            ("Im(a1^2) != 0", lambda p: not _real(p["a1"] ** 2)),
            ("Im(a2^2) != 0", lambda p: not _real(p["a2"] ** 2)),
            ("x1, x2 real", lambda p: _real(p["x1"]) and _real(p["x2"])),
        ),
    ),
    "9": ExampleCase(
        id="9",
        summary="whole line, confluent on sin(k0 x) with Im(c) != 0: level k0^2 joins the discrete spectrum",
        problem=_whole_line,
        transformation=lambda g, p: TransformationSpec.confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), p["c"], 0.0, origin=_origin("9", p)),
        closed_form=None,
        prediction=lambda p: {"added": [p["k0"].real ** 2], "embedded": [p["k0"].real ** 2]},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
    "10": ExampleCase(
        id="10",
        summary="half line, sin(k0 x) with oscillating sin(k1 x + c): k1^2 is a spectral singularity candidate",
        problem=_half_line,
        transformation=lambda g, p: TransformationSpec.non_confluent(
            _form(g, ClosedFormKind.SIN_K, p["k0"].real), _form(g, ClosedFormKind.SIN_K, p["k1"].real, p["c"]),
            origin=_origin("10", p)),
        closed_form=_v1_oscillating,
        prediction=lambda p: {"singular": [p["k1"].real ** 2]},
        constraints=_constraints(
            ("k0 > 0 real", lambda p: _real(p["k0"]) and p["k0"].real > 0),
            ("k1 > 0 real", lambda p: _real(p["k1"]) and p["k1"].real > 0),
            ("k0 != k1", lambda p: abs(p["k0"] - p["k1"]) > 1e-12),
            ("Im(c) != 0", lambda p: not _real(p["c"])),
        ),
    ),
}


@lru_cache(maxsize=1)
def load_fixtures() -> dict:
    return read_json(FIXTURES)


def example_ids() -> List[str]:
    return list(EXAMPLES)


def _case(case_id) -> ExampleCase:
    key = str(case_id)
    if key not in EXAMPLES:
        raise ConfigError(f"unknown example {key!r}", {"known": example_ids()})
    return EXAMPLES[key]


def default_params(case_id) -> Params:
    raw = load_fixtures()[_case(case_id).id]["params"]
    return {name: parse_complex(value) for name, value in raw.items()}


def expected_verdict(case: ExampleCase, problem: BoundaryProblem, params: Params) -> Verdict:
    """Verdict the example is known to produce, from the fixture and its level bookkeeping"""
    flags = load_fixtures()[case.id]["expected"]
    levels = case.prediction(params)
    seed = SeedSpectrum.free(problem)
    isospectral = levels.get("isospectral", False)
    prediction = SpectrumPrediction(
        base=seed.description,
        base_levels=seed.levels,
        continuum_start=seed.continuum_start,
        removed=[complex(e) for e in levels.get("removed", [])],
        added=[complex(e) for e in levels.get("added", [])],
        complex_levels=[complex(e) for e in levels.get("complex", [])],
        embedded_flags=[(complex(e), True) for e in levels.get("embedded", [])],
        spectral_singularity_candidates=[complex(e) for e in levels.get("singular", [])],
        isospectral=isospectral,
    )
    return Verdict(
        problem_kind=problem.kind,
        potential_class=problem.potential_class,
        case_label=CaseLabel(flags["case_label"]),
        irreducible=flags["irreducible"],
        real_spectrum=flags["real_spectrum"],
        complex_potential=True,
        prediction=prediction,
        pt_eligible=flags.get("pt_eligible", False),
        notes=[load_fixtures()[case.id]["provenance"]],
    )


def closed_form_potential(case: ExampleCase, grid: Grid, params: Params) -> Optional[GridFunction]:
    """The displayed V1 on the grid; derivatives are second-order differences"""
    if case.closed_form is None:
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.asarray(case.closed_form(grid.x, params), dtype=complex)
    bad = ~np.isfinite(values)
    values = np.where(bad, np.nan, values)
    derivs = np.gradient(np.where(bad, 0.0, values), grid.h, edge_order=2)
    derivs = np.where(bad, np.nan, derivs)
    return GridFunction(grid, values, derivs, flags=bad if bad.any() else None)


def example(case_id, params: Optional[dict] = None, n: Optional[int] = None) -> ExampleRun:
    """Transformation, closed-form V1 (None where there is none) and expected Verdict"""
    case = _case(case_id)
    merged = default_params(case.id)
    merged.update({name: parse_complex(value) for name, value in (params or {}).items()})

    broken = case.violated(merged)
    if broken:
        raise ConstraintViolation(f"example {case.id} parameters violate: {', '.join(broken)}",
                                  {"example": case.id, "violated": broken})

    problem = case.problem(merged)
    count = n if n is not None else (_int(merged["n"]) if "n" in merged else get_settings().grid_n)
    try:
        grid = problem.grid(count)
    except ValueError as e:
        raise ConfigError(str(e), {"example": case.id, "n": count}) from e
    spec = case.transformation(grid, merged)
    logger.info("example_built", example=case.id, n=grid.n, problem=problem.kind.value)
    return ExampleRun(
        spec=spec,
        closed_form=closed_form_potential(case, grid, merged),
        expected=expected_verdict(case, problem, merged),
        problem=problem,
        params=merged,
    )


def seed_potential(grid: Grid) -> GridFunction:
    return zero_potential(grid)
