"""Classical (composition-free) counterparts of the variational identities.

These work for vector candidates q = (q1, ..., qn) and serve as reduction oracles
for the compositional residuals: for a Lagrangian that does not depend on z, the
compositional Euler-Lagrange and DuBois-Reymond residuals are the negatives of the
classical ones, and the invariance residual and Noether quantity coincide.
"""

import bisect
from collections.abc import Callable, Sequence
from functools import partial

import numpy as np

from ..config.constants import MIN_PIECE_SAMPLES
from ..config.settings import settings
from ..core.exceptions import ExcludedPointError, ValidationError
from ..core.models import ConservationReport, PieceVariation
from ..dynamics.pwmap import Branch, PiecewiseMap
from ..expr.lagrangian import Lagrangian, classical_variables
from ..expr.nodes import FloatArray
from ..noether.generator import SymmetryGenerator
from ..utils.logging import get_logger
from .problem import BoundaryData

logger = get_logger("classic")


class ClassicalProblem:
    """A Lagrangian L(x, q, qd) with an n-component candidate curve on [a, b]."""

    def __init__(
        self,
        lagrangian: Lagrangian,
        candidates: Sequence[PiecewiseMap],
        boundary: Sequence[BoundaryData] | None = None,
        *,
        margin: float | None = None,
        fd_step: float | None = None,
    ) -> None:
        if not candidates:
            raise ValidationError("A classical problem needs at least one candidate component")
        self.dimension = len(candidates)
        expected = classical_variables(self.dimension)
        if lagrangian.variables != expected:
            raise ValidationError(
                f"Lagrangian variables {lagrangian.variables} do not match {self.dimension} component(s): {expected}"
            )
        a, b = candidates[0].a, candidates[0].b
        for component in candidates[1:]:
            if not (np.isclose(component.a, a) and np.isclose(component.b, b)):
                raise ValidationError("All candidate components must share one interval")

        self.lagrangian = lagrangian
        self.candidates = tuple(candidates)
        self.boundary = tuple(boundary) if boundary is not None else None
        self.a, self.b = a, b
        self.margin = margin if margin is not None else settings.BREAKPOINT_MARGIN * (b - a)
        self.fd_step = fd_step if fd_step is not None else settings.FD_STEP * (b - a)

        if self.dimension == 1:
            self.positions: tuple[str, ...] = ("q",)
            self.velocities: tuple[str, ...] = ("qd",)
        else:
            self.positions = expected[1 : 1 + self.dimension]
            self.velocities = expected[1 + self.dimension :]

        cuts = sorted({a, b, *(c for component in candidates for c in component.breakpoints)})
        self.boundaries = tuple(cuts)
        self.breakpoints = tuple(cuts[1:-1])
        self._lowers = cuts[:-1]

    @classmethod
    def scalar(cls, source: str, candidate: PiecewiseMap) -> "ClassicalProblem":
        return cls(Lagrangian.classical(source), [candidate])

    def piece_bounds(self, x: float) -> tuple[float, float]:
        if not self.a <= x <= self.b:
            raise ValidationError(f"x={x!r} lies outside [{self.a}, {self.b}]")
        index = min(bisect.bisect_right(self._lowers, x) - 1, len(self._lowers) - 1)
        return self.boundaries[index], self.boundaries[index + 1]

    def _branches(self, bounds: tuple[float, float]) -> list[Branch]:
        mid = 0.5 * (bounds[0] + bounds[1])
        return [component.branch_at(mid) for component in self.candidates]

    def point(self, x: float, bounds: tuple[float, float] | None = None) -> dict[str, float]:
        """Variable assignment along the candidate, one-sided at piece ends."""
        branches = self._branches(bounds if bounds is not None else self.piece_bounds(x))
        point = {"x": x}
        for name, branch in zip(self.positions, branches, strict=True):
            point[name] = branch.value(x)
        for name, branch in zip(self.velocities, branches, strict=True):
            point[name] = branch.slope(x)
        return point

    def check_interior(self, x: float) -> tuple[float, float]:
        bounds = self.piece_bounds(x)
        for end in self.boundaries:
            if abs(x - end) < self.margin:
                raise ExcludedPointError(f"x={x!r} is within {self.margin:g} of {end!r}", x, end, "breakpoint")
        return bounds

    def rate(self, fn: Callable[[dict[str, float]], float], x: float, bounds: tuple[float, float]) -> float:
        """Central finite difference of fn along the candidate inside one piece."""
        h = self.fd_step
        if x - h < bounds[0] or x + h > bounds[1]:
            end = bounds[0] if x - h < bounds[0] else bounds[1]
            raise ExcludedPointError(f"Probe x={x!r}±{h:g} leaves its smooth piece", x, end, "probe")
        return (fn(self.point(x + h, bounds)) - fn(self.point(x - h, bounds))) / (2.0 * h)

    def energy(self, point: dict[str, float]) -> float:
        """L - sum of d3L_i qd_i."""
        lagrangian = self.lagrangian
        total = lagrangian.value(point)
        for name in self.velocities:
            total -= lagrangian.partial_value(name, point) * point[name]
        return total


def classical_el_residual(cp: ClassicalProblem, x: float) -> FloatArray:
    """d/dx d3L - d2L, one entry per component."""
    bounds = cp.check_interior(x)
    point = cp.point(x, bounds)
    lagrangian = cp.lagrangian
    residual = []
    for position, velocity in zip(cp.positions, cp.velocities, strict=True):
        momentum_rate = cp.rate(partial(lagrangian.partial_value, velocity), x, bounds)
        residual.append(momentum_rate - lagrangian.partial_value(position, point))
    return np.asarray(residual, dtype=np.float64)


def classical_dbr_residual(cp: ClassicalProblem, x: float) -> float:
    """d1L - d/dx [L - d3L qd]."""
    bounds = cp.check_interior(x)
    point = cp.point(x, bounds)
    return cp.lagrangian.partial_value("x", point) - cp.rate(cp.energy, x, bounds)


def _generator_terms(
    cp: ClassicalProblem, g: SymmetryGenerator, x: float, point: dict[str, float]
) -> tuple[float, float, float, float]:
    """tau, xi, tau' and xi' at x; vector candidates only admit tau(x) with xi = 0."""
    if cp.dimension > 1 and (not g.is_x_only or not g.xi_is_zero):
        raise ValidationError("Vector candidates support generators tau(x) with xi = 0 only")
    q = point[cp.positions[0]]
    qd = point[cp.velocities[0]]
    return g.tau_at(x, q), g.xi_at(x, q), g.tau_rate(x, q, qd), g.xi_rate(x, q, qd)


def classical_noether_quantity(
    cp: ClassicalProblem, g: SymmetryGenerator, x: float, bounds: tuple[float, float] | None = None
) -> float:
    """C = d3L xi + (L - d3L qd) tau, on the piece `bounds` when given."""
    point = cp.point(x, bounds)
    tau, xi, _, _ = _generator_terms(cp, g, x, point)
    value = cp.energy(point) * tau
    if xi != 0.0:
        value += cp.lagrangian.partial_value(cp.velocities[0], point) * xi
    return value


def classical_invariance_residual(cp: ClassicalProblem, g: SymmetryGenerator, x: float) -> float:
    """d1L tau + d2L xi + d3L (xi' - qd tau') + L tau'."""
    bounds = cp.check_interior(x)
    point = cp.point(x, bounds)
    tau, xi, tau_rate, xi_rate = _generator_terms(cp, g, x, point)
    lagrangian = cp.lagrangian
    residual = lagrangian.partial_value("x", point) * tau + lagrangian.value(point) * tau_rate
    for position, velocity in zip(cp.positions, cp.velocities, strict=True):
        momentum = lagrangian.partial_value(velocity, point)
        residual -= momentum * point[velocity] * tau_rate
        if xi != 0.0 or xi_rate != 0.0:
            residual += lagrangian.partial_value(position, point) * xi + momentum * xi_rate
    return residual


def classical_conservation_check(
    cp: ClassicalProblem,
    g: SymmetryGenerator,
    *,
    samples_per_piece: int | None = None,
    tolerance: float | None = None,
) -> ConservationReport:
    """Spread of the classical Noether quantity on every smooth piece of the candidate."""
    count = samples_per_piece if samples_per_piece is not None else settings.CONSERVATION_SAMPLES
    base_tol = tolerance if tolerance is not None else settings.CONSERVATION_TOL

    samples: list[float] = []
    c_values: list[float] = []
    rates: list[float] = []
    spans: list[tuple[float, float, list[float]]] = []
    # Probes x ± fd_step stay inside the piece
    inset = cp.margin + cp.fd_step
    for lower, upper in zip(cp.boundaries[:-1], cp.boundaries[1:], strict=True):
        local: list[float] = []
        inner_lower, inner_upper = lower + inset, upper - inset
        if inner_lower < inner_upper:
            for x in np.linspace(inner_lower, inner_upper, count):
                point = float(x)
                value = classical_noether_quantity(cp, g, point, (lower, upper))
                rate = (
                    classical_noether_quantity(cp, g, point + cp.fd_step, (lower, upper))
                    - classical_noether_quantity(cp, g, point - cp.fd_step, (lower, upper))
                ) / (2.0 * cp.fd_step)
                samples.append(point)
                c_values.append(value)
                rates.append(rate)
                local.append(value)
        spans.append((lower, upper, local))

    max_abs_c = max((abs(c) for c in c_values), default=0.0)
    tol = base_tol * (1.0 + max_abs_c)
    pieces = [
        PieceVariation(
            lower=lower,
            upper=upper,
            variation=(max(local) - min(local)) if local else 0.0,
            count=len(local),
            flagged=len(local) < MIN_PIECE_SAMPLES,
        )
        for lower, upper, local in spans
    ]
    conserved = all(piece.variation <= tol for piece in pieces if not piece.flagged)
    dc_dx_sup = max((abs(r) for r in rates), default=0.0)
    rms = float(np.sqrt(np.mean(np.square(rates)))) if rates else 0.0
    return ConservationReport(
        which="classical-noether",
        mode="classical",
        samples=samples,
        residuals=rates,
        sup_norm=dc_dx_sup,
        rms=rms,
        tolerance=tol,
        passed=conserved,
        c_values=c_values,
        pieces_variation=pieces,
        max_abs_c=max_abs_c,
        dc_dx_sup=dc_dx_sup,
        verdict="conserved" if conserved else "not conserved",
        tau=g.tau_text,
        xi=g.xi_text,
    )
