"""Problem file schema and loaders.

A problem file is a JSON document with `lagrangian` and `map` sections and
optional `interval`, `composition_mode`, `boundary`, `symmetry`, `density`,
`quadrature` and `tolerances` sections. Unknown keys are rejected.
"""

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as SchemaError

from ..config.constants import COMPOSITIONAL_VARIABLES
from ..config.settings import settings
from ..core.exceptions import ValidationError
from ..dynamics.pwmap import PiecewiseMap
from ..expr.lagrangian import Lagrangian
from ..expr.parser import parse
from ..noether.generator import SymmetryGenerator
from ..variational.problem import BoundaryData, Problem
from ..variational.quadrature import QuadratureSpec
from .logging import get_logger

logger = get_logger("problem_file")


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LagrangianSection(Section):
    expr: str = Field(description="Lagrangian body in the declared variables")
    variables: list[str] = Field(default_factory=lambda: list(COMPOSITIONAL_VARIABLES))

    @field_validator("variables")
    @classmethod
    def check_variables(cls, value: list[str]) -> list[str]:
        unknown = [name for name in value if name not in COMPOSITIONAL_VARIABLES]
        if unknown:
            raise ValueError(f"variables must be drawn from {COMPOSITIONAL_VARIABLES}, got {unknown}")
        if len(set(value)) != len(value):
            raise ValueError("variables must not repeat")
        return value


class BranchSection(Section):
    interval: tuple[float, float]
    expr: str = Field(description="Branch body in x")

    @model_validator(mode="after")
    def check_interval(self) -> "BranchSection":
        if not self.interval[0] < self.interval[1]:
            raise ValueError(f"branch interval {list(self.interval)} is empty")
        return self


class BoundarySection(Section):
    q_a: float | None = None
    q_b: float | None = None
    z_a: float | None = None
    z_b: float | None = None


class SymmetrySection(Section):
    tau: str = "0"
    xi: str = "0"


class DensitySection(Section):
    grid: int = Field(default=settings.DENSITY_GRID, ge=2)
    iterations: int = Field(default=settings.DENSITY_ITERATIONS, ge=1)
    mode: Literal["cesaro", "plain"] = "cesaro"


class QuadratureSection(Section):
    tol: float = Field(default=settings.QUAD_TOL, gt=0)
    max_panels: int = Field(default=settings.QUAD_MAX_PANELS, ge=1)


class TolerancesSection(Section):
    residual: float = Field(default=settings.RESIDUAL_TOL, gt=0)
    conservation: float = Field(default=settings.CONSERVATION_TOL, gt=0)
    density: float = Field(default=settings.DENSITY_TOL, gt=0)


class ProblemFile(Section):
    """Validated contents of a problem file."""

    lagrangian: LagrangianSection
    map: list[BranchSection] = Field(min_length=1)
    interval: tuple[float, float] | None = None
    composition_mode: Literal["actual", "per_branch"] = "actual"
    boundary: BoundarySection | None = None
    symmetry: SymmetrySection | None = None
    density: DensitySection = Field(default_factory=DensitySection)
    quadrature: QuadratureSection = Field(default_factory=QuadratureSection)
    tolerances: TolerancesSection = Field(default_factory=TolerancesSection)

    @property
    def span(self) -> tuple[float, float]:
        return self.map[0].interval[0], self.map[-1].interval[1]


def load_problem_file(path: str | Path) -> ProblemFile:
    """Read and validate a problem file; every failure is a ValidationError."""
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"Cannot read problem file {source}: {e}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source} is not valid JSON: {e}") from e
    try:
        problem = ProblemFile.model_validate(document)
    except SchemaError as e:
        raise ValidationError(f"Invalid problem file {source}: {e}") from e
    logger.debug("Loaded %s: %d branches, mode %s", source, len(problem.map), problem.composition_mode)
    return problem


def build_lagrangian(pf: ProblemFile) -> Lagrangian:
    """Parse the body against the declared variables, then lift it to L(x, q, qd, z)."""
    body = parse(pf.lagrangian.expr, pf.lagrangian.variables)
    return Lagrangian(body, COMPOSITIONAL_VARIABLES)


def build_map(pf: ProblemFile, *, self_composable: bool = True, check_monotone: bool = True) -> PiecewiseMap:
    records = [(branch.interval, branch.expr) for branch in pf.map]
    m = PiecewiseMap.from_records(records, self_composable=self_composable, check_monotone=check_monotone)
    if pf.interval is not None and (pf.interval[0] != m.a or pf.interval[1] != m.b):
        raise ValidationError(f"interval {list(pf.interval)} differs from the map's span [{m.a}, {m.b}]")
    return m


def build_problem(pf: ProblemFile) -> Problem:
    """Problem in the file's composition mode.

    Candidates of z-free Lagrangians need be neither monotone nor self-maps.
    """
    lagrangian = build_lagrangian(pf)
    uses_z = lagrangian.depends_on_z
    candidate = build_map(pf, self_composable=uses_z, check_monotone=uses_z)
    boundary = BoundaryData(**pf.boundary.model_dump()) if pf.boundary is not None else None
    return Problem(lagrangian, candidate, pf.composition_mode, boundary, interval=pf.interval)


def build_generator(pf: ProblemFile, tau: str | None = None, xi: str | None = None) -> SymmetryGenerator | None:
    """Generator from explicit expressions, falling back to the file's symmetry section."""
    if tau is not None or xi is not None:
        return SymmetryGenerator.parse(tau if tau is not None else "0", xi if xi is not None else "0")
    if pf.symmetry is None:
        return None
    return SymmetryGenerator.parse(pf.symmetry.tau, pf.symmetry.xi)


def quadrature_spec(pf: ProblemFile) -> QuadratureSpec:
    return QuadratureSpec(tol=pf.quadrature.tol, max_panels=pf.quadrature.max_panels)
