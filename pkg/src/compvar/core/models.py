"""Report models for compvar analyses."""

from typing import Literal

from pydantic import BaseModel, Field


class BaseResult(BaseModel):
    """Base class for all analysis results with standardized error handling."""

    error: str | None = None


class ExcludedPoint(BaseModel):
    """A sample point that was not evaluated, and why."""

    x: float
    reason: str = Field(description="breakpoint, preimage, probe or generator")


class PieceNorm(BaseModel):
    """Residual norms restricted to one smooth piece."""

    lower: float
    upper: float
    sup_norm: float
    rms: float
    count: int


class ResidualReport(BaseResult):
    """Residuals of one identity at uniform sample points."""

    which: str
    mode: str
    samples: list[float] = Field(default_factory=list)
    residuals: list[float] = Field(default_factory=list)
    excluded: list[ExcludedPoint] = Field(default_factory=list)
    sup_norm: float = 0.0
    rms: float = 0.0
    pieces: list[PieceNorm] = Field(default_factory=list)
    tolerance: float
    passed: bool
    functional_value: float | None = None


class PieceVariation(BaseModel):
    """Spread of the conserved quantity on one smooth piece."""

    lower: float
    upper: float
    variation: float
    count: int
    flagged: bool = Field(default=False, description="Fewer valid samples than needed for a verdict")


class TauTableReport(BaseModel):
    """Sampled symmetry generator tau produced by the reduced invariance ODE."""

    x_ref: float
    nodes: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)


class ConservationReport(ResidualReport):
    """Conserved quantity C along the candidate; `residuals` hold dC/dx at `samples`."""

    c_values: list[float] = Field(default_factory=list)
    pieces_variation: list[PieceVariation] = Field(default_factory=list)
    max_abs_c: float = 0.0
    dc_dx_sup: float = 0.0
    verdict: Literal["conserved", "not conserved"]
    tau: str | None = None
    xi: str | None = None
    gauge_nodes: list[float] = Field(default_factory=list)
    gauge_values: list[float] = Field(default_factory=list)
    tau_table: TauTableReport | None = None


class DensityReport(BaseResult):
    """Invariant density on a grid with its fixed-point residual."""

    mode: str
    iterations: int
    nodes: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)
    fixed_point_residual: float
    mass: float
    chaos_value: float | None = None
    tolerance: float
    passed: bool


class CheckOutcome(BaseModel):
    """One line of the worked-example pass/fail matrix."""

    name: str
    mode: str
    value: float
    bound: float
    passed: bool
    fidelity: bool = Field(description="Whether the check counts towards the exit status")


class VerificationReport(BaseResult):
    """Pass/fail matrix of the built-in worked example."""

    checks: list[CheckOutcome] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)
    passed: bool
