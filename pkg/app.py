"""
Command-line entry point: build partner potentials, classify them and check
their spectra from a JSON run configuration or a catalog example.

Exit codes: 0 all checks pass, 1 checks ran but failed, 2 the configuration
is invalid, 3 a numerical stage failed (error.json is written).
"""
import argparse
import sys
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, BeforeValidator, Field, ValidationError, field_validator, model_validator

# Load environment variables
load_dotenv()

from catalog import default_params
from catalog import example as build_example
from classifier import SeedSpectrum
from core.closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from core.grid import BoundaryProblem, GridFunction, PotentialClass, ProblemKind, harmonic_potential, zero_potential
from core.integrator import solve_ivp
from core.serialize import parse_complex, read_grid_csv, read_json, write_eigen_csv, write_grid_csv, write_json
from darboux import TransformationSpec, TransformMode
from errors import ConfigError, ConstraintViolation, SusyError
from logger_config import logger
from pipeline import Job, run_classify, run_spectrum, run_transform, run_verify
from settings import get_settings
from spectral import seed_levels
from stage_metrics import write_metrics

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _complex_field(value: Any) -> complex:
    try:
        return parse_complex(value)
    except ConfigError as e:
        raise ValueError(e.message) from e


ComplexValue = Annotated[complex, BeforeValidator(_complex_field)]


class Command(str, Enum):
    TRANSFORM = "transform"
    CLASSIFY = "classify"
    SPECTRUM = "spectrum"
    VERIFY = "verify"
    EXAMPLE = "example"


class ProblemConfig(BaseModel):
    kind: ProblemKind
    a: Optional[float] = None
    b: Optional[float] = None
    L: Optional[float] = None
    potential_class: PotentialClass = PotentialClass.GENERIC

    @model_validator(mode="after")
    def _endpoints(self):
        if self.kind == ProblemKind.FINITE_INTERVAL and (self.a is None or self.b is None):
            raise ValueError("a finite interval needs both endpoints a and b")
        if self.kind == ProblemKind.FINITE_INTERVAL and not self.a < self.b:
            raise ValueError("a finite interval needs a < b")
        if self.L is not None and self.L <= 0:
            raise ValueError("truncation L must be positive")
        return self

    def build(self, trunc_L: float) -> BoundaryProblem:
        L = self.L if self.L is not None else trunc_L
        if self.kind == ProblemKind.FINITE_INTERVAL:
            return BoundaryProblem(self.kind, self.a, self.b, potential_class=self.potential_class)
        if self.kind == ProblemKind.HALF_LINE:
            return BoundaryProblem.half_line(L, self.potential_class)
        return BoundaryProblem.whole_line(L, self.potential_class)


class ClosedFormConfig(BaseModel):
    kind: ClosedFormKind
    param: ComplexValue
    shift: ComplexValue = 0j


class IVPConfig(BaseModel):
    energy: ComplexValue
    x_start: float = 0.0
    u0: ComplexValue
    du0: ComplexValue


class FunctionConfig(BaseModel):
    closed_form: Optional[ClosedFormConfig] = None
    ivp: Optional[IVPConfig] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.closed_form is None) == (self.ivp is None):
            raise ValueError("a transformation function needs exactly one of closed_form or ivp")
        return self

    def build(self, V0: GridFunction) -> GridFunction:
        if self.closed_form is not None:
            form = ClosedForm(self.closed_form.kind, self.closed_form.param, self.closed_form.shift)
            return make_closed_form(form, V0.grid)
        ivp = self.ivp
        try:
            V0.grid.index_of(ivp.x_start)
        except ValueError as e:
            raise ConfigError("ivp x_start is not a grid node",
                              {"x_start": ivp.x_start, "h": V0.grid.h, "x0": V0.grid.x0}) from e
        return solve_ivp(V0, ivp.energy, ivp.x_start, ivp.u0, ivp.du0)


class TransformationConfig(BaseModel):
    mode: TransformMode
    functions: List[FunctionConfig]
    c: Optional[ComplexValue] = None
    x_anchor: float = 0.0

    @model_validator(mode="after")
    def _arity(self):
        want = 1 if self.mode == TransformMode.CONFLUENT else 2
        if len(self.functions) != want:
            raise ValueError(f"{self.mode.value} transformations take {want} function(s)")
        if self.mode == TransformMode.CONFLUENT and self.c is None:
            raise ValueError("confluent transformations need the constant c")
        return self

    def build(self, V0: GridFunction) -> TransformationSpec:
        functions = [f.build(V0) for f in self.functions]
        if self.mode == TransformMode.CONFLUENT:
            return TransformationSpec.confluent(functions[0], self.c, self.x_anchor)
        return TransformationSpec.non_confluent(*functions)


class NumericConfig(BaseModel):
    grid_n: Optional[int] = Field(None, ge=3)
    eig_n: Optional[int] = Field(None, ge=16)
    levels: Optional[int] = Field(None, ge=1)
    trunc_L: Optional[float] = Field(None, gt=0)
    tol: Optional[float] = Field(None, gt=0)

    @field_validator("grid_n")
    @classmethod
    def _odd(cls, value):
        if value is not None and value % 2 == 0:
            raise ValueError("grid_n must be odd so x = 0 can be a node")
        return value


class RunConfig(BaseModel):
    command: Command = Command.VERIFY
    problem: Optional[ProblemConfig] = None
    seed_potential: str = "zero"
    omega: float = Field(1.0, gt=0)
    transformation: Optional[TransformationConfig] = None
    numeric: NumericConfig = Field(default_factory=NumericConfig)
    output: str = "out"
    example: Optional[str] = None
    params: Dict[str, ComplexValue] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _complete(self):
        if self.command == Command.EXAMPLE and self.example is None:
            raise ValueError("the example command needs an example id")
        if self.example is None and (self.problem is None or self.transformation is None):
            raise ValueError("a run needs either an example id or both problem and transformation")
        if self.seed_potential not in ("zero", "harmonic") and not Path(self.seed_potential).exists():
            raise ValueError(f"seed potential file {self.seed_potential} does not exist")
        return self


def _resolve_numeric(config: RunConfig) -> Dict[str, Any]:
    """Config values over environment defaults; explicit grid_n is kept apart"""
    settings = get_settings()
    numeric = config.numeric
    return {
        "grid_n": numeric.grid_n,
        "eig_n": numeric.eig_n or settings.eig_n,
        "levels": numeric.levels or settings.levels,
        "trunc_L": numeric.trunc_L or settings.trunc_L,
        "tol": numeric.tol or settings.tol,
    }


def _example_job(config: RunConfig, numeric: Dict[str, Any]) -> Job:
    params = dict(config.params)
    if config.numeric.trunc_L is not None and "L" in default_params(config.example):
        params["L"] = config.numeric.trunc_L
    run = build_example(config.example, params, n=numeric["grid_n"])
    grid_n = run.spec.grid.n
    width = run.problem.b - run.problem.a

    def rebuild(problem: BoundaryProblem) -> Job:
        n = int(round((grid_n - 1) * (problem.b - problem.a) / width)) + 1
        other = build_example(config.example, {**run.params, "L": problem.L}, n=n)
        return Job(problem=other.problem, V0=zero_potential(other.spec.grid), spec=other.spec,
                   label=f"example {config.example}")

    return Job(problem=run.problem, V0=zero_potential(run.spec.grid), spec=run.spec, expected=run.expected,
               rebuild=rebuild, label=f"example {config.example}")


def _seed_on(config: RunConfig, problem: BoundaryProblem, n: int) -> GridFunction:
    grid = problem.grid(n)
    if config.seed_potential == "zero":
        return zero_potential(grid)
    return harmonic_potential(grid, config.omega)


def _config_job(config: RunConfig, numeric: Dict[str, Any]) -> Job:
    problem = config.problem.build(numeric["trunc_L"])
    if config.seed_potential in ("zero", "harmonic"):
        grid_n = numeric["grid_n"] or get_settings().grid_n
        try:
            V0 = _seed_on(config, problem, grid_n)
        except ValueError as e:
            raise ConfigError(str(e), {"grid_n": grid_n}) from e
    else:
        V0 = read_grid_csv(config.seed_potential)
        if abs(V0.grid.x0 - problem.a) > 1e-9 or abs(V0.grid.x1 - problem.b) > 1e-9:
            raise ConfigError("seed potential grid does not span the problem",
                              {"grid": [V0.grid.x0, V0.grid.x1], "problem": [problem.a, problem.b]})

    seed = None
    if config.seed_potential == "harmonic":
        seed = SeedSpectrum.harmonic(config.omega)
    elif config.seed_potential != "zero":
        seed = seed_levels(V0, problem, numeric["levels"] * 2, numeric["eig_n"])

    rebuild = None
    if config.seed_potential in ("zero", "harmonic"):
        width = problem.b - problem.a

        def rebuild(other: BoundaryProblem) -> Job:
            n = int(round((V0.grid.n - 1) * (other.b - other.a) / width)) + 1
            V = _seed_on(config, other, n)
            return Job(problem=other, V0=V, spec=config.transformation.build(V), seed=seed)

    return Job(problem=problem, V0=V0, spec=config.transformation.build(V0), seed=seed, rebuild=rebuild)


def build_job(config: RunConfig) -> Job:
    numeric = _resolve_numeric(config)
    return _example_job(config, numeric) if config.example is not None else _config_job(config, numeric)


def execute(config: RunConfig) -> int:
    """Run one command and write its artifacts; returns the exit code"""
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    numeric = _resolve_numeric(config)
    job = build_job(config)
    command = config.command
    logger.info("run_started", command=command.value, label=job.label, out=str(out))

    if command == Command.TRANSFORM:
        result = run_transform(job)
        write_grid_csv(out / "V1.csv", result.V1)
        write_grid_csv(out / "W.csv", result.W)
        write_json(out / "result.json", {**result.to_dict(), "V1": "V1.csv", "W": "W.csv",
                                         "problem": job.problem.to_dict()})
        return EXIT_OK if result.regular else EXIT_FAILED

    if command == Command.CLASSIFY:
        write_json(out / "verdict.json", run_classify(job))
        return EXIT_OK

    if command == Command.SPECTRUM:
        result = run_transform(job)
        computed = run_spectrum(result.V1, job.problem, numeric["levels"], numeric["eig_n"])
        write_json(out / "spectrum.json", computed)
        write_eigen_csv(out / "eigenvalues.csv", computed.eigenvalues, computed.residuals)
        return EXIT_OK

    report = run_verify(job, k=numeric["levels"], n=numeric["eig_n"], tol=numeric["tol"])
    write_json(out / "report.json", report)
    return EXIT_OK if report.passed else EXIT_FAILED


def load_config(args: argparse.Namespace) -> RunConfig:
    """Config file, then command-line overrides"""
    data: Dict[str, Any] = {}
    if args.config:
        data = read_json(args.config)
        if not isinstance(data, dict):
            raise ConfigError("run configuration must be a JSON object", {"path": args.config})
    if args.command:
        data["command"] = args.command
    if args.example:
        data["example"] = args.example
        data.setdefault("command", Command.EXAMPLE.value)
    if args.out:
        data["output"] = args.out

    numeric = dict(data.get("numeric") or {})
    for flag, key in (("grid_n", "grid_n"), ("eig_n", "eig_n"), ("levels", "levels"),
                      ("trunc_L", "trunc_L"), ("tol", "tol")):
        value = getattr(args, flag)
        if value is not None:
            numeric[key] = value
    data["numeric"] = numeric
    return RunConfig.model_validate(data)


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Second-order SUSY partner potentials: build, classify, verify")
    parser.add_argument("command", nargs="?", choices=[c.value for c in Command],
                        help="Stage to run (default from the config, else verify)")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--example", help="Catalog example id (1-10 or 3b)")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--grid-n", dest="grid_n", type=int, help="Grid nodes (odd)")
    parser.add_argument("--eig-n", dest="eig_n", type=int, help="Interior nodes of the eigenvalue discretization")
    parser.add_argument("--levels", type=int, help="Number of lowest levels to verify")
    parser.add_argument("--trunc-L", dest="trunc_L", type=float, help="Truncation of unbounded domains")
    parser.add_argument("--tol", type=float, help="Spectral matching tolerance")
    parser.add_argument("--metrics", action="store_true", help="Write stage metrics to <out>/metrics.prom")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        config = load_config(args)
    except (ConfigError, ValidationError) as e:
        logger.error("config_invalid", error=str(e))
        return EXIT_CONFIG

    out = Path(config.output)
    try:
        code = execute(config)
    except (ConfigError, ConstraintViolation) as e:
        logger.error("config_invalid", error=e.message, details=e.details)
        return EXIT_CONFIG
    except SusyError as e:
        logger.error("run_failed", error=e.message, kind=type(e).__name__)
        write_json(out / "error.json", e.to_dict())
        return EXIT_NUMERIC
    finally:
        if args.metrics:
            out.mkdir(parents=True, exist_ok=True)
            write_metrics(str(out / "metrics.prom"))

    logger.info("run_finished", command=config.command.value, exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
