"""Finding symmetry generators: the reduced tau-ODE and null spaces of collocated invariance residuals."""

import math
from collections.abc import Sequence

import numpy as np
from scipy.linalg import null_space

from ..config.constants import COLLOCATION_ROWS_PER_UNKNOWN
from ..config.settings import settings
from ..core.exceptions import ExcludedPointError, OdeSingularError, RankDeficientError, ValidationError
from ..expr.nodes import Expr, FloatArray
from ..utils.logging import get_logger
from ..variational.problem import Problem
from ..variational.quadrature import CumulativeIntegral
from .generator import SymmetryGenerator, TauTable
from .invariance import InvarianceForm, invariance_residual

logger = get_logger("symmetries")


def tau_ode_nodes(p: Problem, count: int | None = None) -> list[float]:
    """Uniform nodes of [a, b], each pulled inside its piece by the breakpoint margin."""
    nodes = set()
    for x in np.linspace(p.a, p.b, count if count is not None else settings.GAUGE_NODES):
        piece = p.piece_at(float(x))
        nodes.add(min(max(float(x), piece.lower + p.margin), piece.upper - p.margin))
    return sorted(nodes)


def solve_tau_ode(p: Problem, x_ref: float | None = None, *, nodes: int | None = None) -> SymmetryGenerator:
    """Solve d1L tau + (L - d3L q') tau' = 0 along the candidate with tau(x_ref) = 1.

    This is the invariance condition with xi = 0. The result is a sampled
    generator whose tau' comes straight from the ODE.
    """
    reference = x_ref if x_ref is not None else p.b
    if not p.a <= reference <= p.b:
        raise ValidationError(f"x_ref={reference!r} lies outside [{p.a}, {p.b}]")
    lagrangian = p.lagrangian
    delta_min = p.candidate.delta_min

    def denominator(x: float) -> float:
        state = p.state(x)
        return p.value(lagrangian.body, state) - p.value(lagrangian.d3, state) * state.qd

    def rate(x: float) -> float:
        return p.value(lagrangian.d1, p.state(x)) / denominator(x)

    table_nodes = tau_ode_nodes(p, nodes)
    for x in (*table_nodes, reference):
        value = denominator(x)
        if abs(value) < delta_min:
            raise OdeSingularError(f"L - d3L q' = {value:.3g} vanishes at x={x:.15g}", x)

    exponent = CumulativeIntegral(rate, [*table_nodes, *p.breakpoints], reference)
    values = np.asarray([math.exp(-exponent.at(x)) for x in table_nodes], dtype=np.float64)
    table = TauTable(
        x_ref=reference,
        nodes=np.asarray(table_nodes, dtype=np.float64),
        values=values,
        exponent=exponent,
        rate=rate,
    )
    logger.info("Solved the tau ODE on %d nodes anchored at x_ref=%.15g", len(table_nodes), reference)
    return SymmetryGenerator.sampled(table)


def collocation_matrix(
    p: Problem,
    basis_tau: Sequence[Expr],
    basis_xi: Sequence[Expr],
    n_colloc: int,
    form: InvarianceForm = "direct",
) -> tuple[FloatArray, FloatArray]:
    """Invariance residual of every basis generator (columns) at collocation points (rows).

    Points where any column is excluded are dropped. Returns (points, matrix).
    """
    generators = [SymmetryGenerator(tau=e) for e in basis_tau] + [SymmetryGenerator(xi=e) for e in basis_xi]
    points: list[float] = []
    rows: list[list[float]] = []
    for point in np.linspace(p.a, p.b, n_colloc):
        x = float(point)
        try:
            row = [invariance_residual(p, g, x, form) for g in generators]
        except ExcludedPointError as e:
            logger.debug("Collocation point x=%.15g dropped (%s)", x, e.reason)
            continue
        points.append(x)
        rows.append(row)
    return np.asarray(points, dtype=np.float64), np.asarray(rows, dtype=np.float64).reshape(len(rows), len(generators))


def null_vectors(matrix: FloatArray, eps: float | None = None) -> FloatArray:
    """Orthonormal null-space basis (columns), each signed so its largest entry is positive."""
    basis = null_space(matrix, rcond=eps if eps is not None else settings.NULL_SPACE_EPS)
    for j in range(basis.shape[1]):
        if basis[np.argmax(np.abs(basis[:, j])), j] < 0.0:
            basis[:, j] = -basis[:, j]
    return basis


def find_symmetries(
    p: Problem,
    basis_tau: Sequence[Expr],
    basis_xi: Sequence[Expr],
    n_colloc: int,
    *,
    eps: float | None = None,
    form: InvarianceForm = "direct",
) -> list[SymmetryGenerator]:
    """Linear combinations of the basis generators whose invariance residual vanishes.

    The residual is linear in (tau, xi), so the null space of the collocation
    matrix gives the admissible coefficient vectors; singular values at or below
    eps * sigma_max count as zero.
    """
    unknowns = len(basis_tau) + len(basis_xi)
    if unknowns == 0:
        return []
    if n_colloc < COLLOCATION_ROWS_PER_UNKNOWN * unknowns:
        raise ValidationError(
            f"n_colloc={n_colloc} is below {COLLOCATION_ROWS_PER_UNKNOWN} rows per basis element ({unknowns})"
        )
    threshold = eps if eps is not None else settings.NULL_SPACE_EPS
    points, matrix = collocation_matrix(p, basis_tau, basis_xi, n_colloc, form)
    if points.size == 0:
        raise RankDeficientError(f"All {n_colloc} collocation points were excluded")
    if points.size < unknowns:
        logger.warning("Only %d usable collocation rows for %d unknowns", points.size, unknowns)

    vectors = null_vectors(matrix, threshold)
    generators = []
    for j in range(vectors.shape[1]):
        column = np.where(np.abs(vectors[:, j]) < threshold, 0.0, vectors[:, j])
        generators.append(SymmetryGenerator.combine(column.tolist(), basis_tau, basis_xi))
    logger.info(
        "Null space of dimension %d from %d collocation rows and %d basis generators",
        len(generators),
        points.size,
        unknowns,
    )
    return generators
