"""Gauge term, conserved quantity and conservation checks for compositional problems."""

from dataclasses import dataclass

import numpy as np

from ..config.constants import MIN_PIECE_SAMPLES
from ..config.settings import settings
from ..core.exceptions import ExcludedPointError, ExpressionDomainError
from ..core.models import ConservationReport, ExcludedPoint, PieceVariation, TauTableReport
from ..expr.nodes import FloatArray
from ..utils.logging import get_logger
from ..variational.problem import Piece, Problem
from ..variational.quadrature import CumulativeIntegral
from ..variational.residuals import summarize
from .generator import SymmetryGenerator

logger = get_logger("gauge")


@dataclass(frozen=True, eq=False)
class GaugeFn:
    """f(x) tabulated on nodes of [a, b] with f(a) = 0; `integral` is None when f vanishes."""

    nodes: FloatArray
    values: FloatArray
    integral: CumulativeIntegral | None = None

    def at(self, x: float) -> float:
        if self.integral is None:
            return 0.0
        return self.integral.at(x)


def gauge_nodes(p: Problem, count: int | None = None) -> list[float]:
    """Uniform nodes plus every piece boundary and point where the preimage count of q changes."""
    uniform = np.linspace(p.a, p.b, count if count is not None else settings.GAUGE_NODES)
    return sorted({*(float(x) for x in uniform), *p.critical_nodes()})


def gauge_f(p: Problem, g: SymmetryGenerator, *, nodes: int | None = None) -> GaugeFn:
    """Integral from a of tau * q'(x) * sum over t in q^-1(x) of d4L(t) / |q'(t)|."""
    grid = gauge_nodes(p, nodes)
    if not p.uses_z or g.tau_is_zero:
        points = np.asarray(grid, dtype=np.float64)
        return GaugeFn(points, np.zeros_like(points))

    d4 = p.lagrangian.d4

    def integrand(x: float) -> float:
        state = p.state(x)
        return g.tau_at(x, state.q) * state.qd * p.preimage_sum(d4, x, strict=False)

    integral = CumulativeIntegral(integrand, grid, p.a)
    logger.debug("Gauge term tabulated on %d nodes, f(b) = %.15g", integral.nodes.size, integral.values[-1])
    return GaugeFn(integral.nodes, integral.values, integral)


def conserved_quantity(
    p: Problem, g: SymmetryGenerator, f: GaugeFn, x: float, piece: Piece | None = None
) -> float:
    """C = (L - d3L q') tau + d3L xi + f along the candidate."""
    lagrangian = p.lagrangian
    state = p.state(x, piece)
    tau = g.tau_at(x, state.q)
    xi = g.xi_at(x, state.q)
    momentum = p.value(lagrangian.d3, state)
    value = (p.value(lagrangian.body, state) - momentum * state.qd) * tau + f.at(x)
    if xi != 0.0:
        value += momentum * xi
    return value


def conservation_check(
    p: Problem,
    g: SymmetryGenerator,
    *,
    samples_per_piece: int | None = None,
    tolerance: float | None = None,
    gauge: GaugeFn | None = None,
) -> ConservationReport:
    """Sample C on every smooth piece and compare its spread against the tolerance.

    Samples are inset from the piece ends by the breakpoint margin plus one
    finite-difference step, so dC/dx never probes across a breakpoint. The
    tolerance is relative: CONSERVATION_TOL * (1 + max |C|).
    """
    count = samples_per_piece if samples_per_piece is not None else settings.CONSERVATION_SAMPLES
    base_tol = tolerance if tolerance is not None else settings.CONSERVATION_TOL
    f = gauge if gauge is not None else gauge_f(p, g)
    h = p.fd_step
    inset = p.margin + h

    samples: list[float] = []
    c_values: list[float] = []
    rates: list[float] = []
    excluded: list[ExcludedPoint] = []
    spans: list[tuple[Piece, list[float]]] = []
    for piece in p.pieces:
        local: list[float] = []
        lower, upper = piece.lower + inset, piece.upper - inset
        if lower < upper:
            for point in np.linspace(lower, upper, count):
                x = float(point)
                try:
                    value = conserved_quantity(p, g, f, x, piece)
                    rate = (conserved_quantity(p, g, f, x + h, piece) - conserved_quantity(p, g, f, x - h, piece)) / (
                        2.0 * h
                    )
                except ExpressionDomainError as e:
                    logger.debug("Excluded x=%.15g from the conservation check: %s", x, e)
                    excluded.append(ExcludedPoint(x=x, reason="generator"))
                    continue
                except ExcludedPointError as e:
                    excluded.append(ExcludedPoint(x=x, reason=e.reason))
                    continue
                samples.append(x)
                c_values.append(value)
                rates.append(rate)
                local.append(value)
        spans.append((piece, local))

    max_abs_c = max((abs(c) for c in c_values), default=0.0)
    tol = base_tol * (1.0 + max_abs_c)
    pieces = [
        PieceVariation(
            lower=piece.lower,
            upper=piece.upper,
            variation=(max(local) - min(local)) if local else 0.0,
            count=len(local),
            flagged=len(local) < MIN_PIECE_SAMPLES,
        )
        for piece, local in spans
    ]
    for piece in pieces:
        if piece.flagged:
            logger.warning("Piece [%g, %g] has only %d valid samples", piece.lower, piece.upper, piece.count)
    judged = [piece for piece in pieces if not piece.flagged]
    conserved = bool(judged) and all(piece.variation <= tol for piece in judged)

    base = summarize(p, "noether", samples, rates, excluded, tol)
    table = g.table
    report = ConservationReport(
        **base.model_dump(exclude={"passed"}),
        passed=conserved,
        c_values=c_values,
        pieces_variation=pieces,
        max_abs_c=max_abs_c,
        dc_dx_sup=base.sup_norm,
        verdict="conserved" if conserved else "not conserved",
        tau=g.tau_text,
        xi=g.xi_text,
        gauge_nodes=f.nodes.tolist(),
        gauge_values=f.values.tolist(),
        tau_table=(
            TauTableReport(x_ref=table.x_ref, nodes=table.nodes.tolist(), values=table.values.tolist())
            if table is not None
            else None
        ),
    )
    logger.info(
        "Conservation check (%s): %s, max per-piece variation %.3g, sup |dC/dx| %.3g",
        p.mode,
        report.verdict,
        max((piece.variation for piece in judged), default=0.0),
        report.dc_dx_sup,
    )
    return report
