"""Invariance condition for compositional Lagrangians under a one-parameter transformation."""

from typing import Literal

from ..core.exceptions import ExcludedPointError, ExpressionDomainError, ValidationError
from ..core.models import ResidualReport
from ..variational.problem import Piece, Problem
from ..variational.residuals import scan
from .generator import SymmetryGenerator

type InvarianceForm = Literal["direct", "fp", "preimage"]

INVARIANCE_FORMS: tuple[str, ...] = ("direct", "fp", "preimage")


def _nearest_end(p: Problem, x: float) -> float:
    return min((p.a, *p.breakpoints, p.b), key=lambda end: abs(end - x))


def _generator_values(
    p: Problem, g: SymmetryGenerator, x: float, q: float, qd: float
) -> tuple[float, float, float, float]:
    try:
        return g.tau_at(x, q), g.xi_at(x, q), g.tau_rate(x, q, qd), g.xi_rate(x, q, qd)
    except ExpressionDomainError as e:
        message = f"Generator is not evaluable at x={x!r}: {e}"
        raise ExcludedPointError(message, x, _nearest_end(p, x), "generator") from e


def _xi_after_q(p: Problem, g: SymmetryGenerator, x: float, piece: Piece) -> float:
    """xi evaluated at (x -> q(x), q -> z(x))."""
    state = p.state(x, piece)
    try:
        return g.xi_at(state.q, state.z)
    except ExpressionDomainError as e:
        raise ExcludedPointError(
            f"xi is not evaluable at (q(x), z(x)) for x={x!r}: {e}", x, _nearest_end(p, x), "generator"
        ) from e


def invariance_residual(p: Problem, g: SymmetryGenerator, x: float, form: InvarianceForm = "direct") -> float:
    """Left-hand side of the invariance condition at x.

    direct:   d1L tau + d2L xi + d3L (xi' - qd tau') + d4L qd(q(x)) xi + d4L xi(q(x)) + L tau'
    preimage: as direct, with d4L xi(q(x)) replaced by xi * sum over t in q^-1(x) of d4L(t) / |q'(t)|
    fp:       d1L tau + (d/dx d3L) xi + d3L (xi' - qd tau') + L tau'

    The forms agree along Euler-Lagrange extremals.
    """
    if form not in INVARIANCE_FORMS:
        raise ValidationError(f"Unknown invariance form '{form}'; expected one of {', '.join(INVARIANCE_FORMS)}")
    lagrangian = p.lagrangian
    piece = p.check_interior(x)
    state = p.state(x, piece)
    tau, xi, tau_rate, xi_rate = _generator_values(p, g, x, state.q, state.qd)

    residual = p.value(lagrangian.d1, state) * tau
    residual += p.value(lagrangian.d3, state) * (xi_rate - state.qd * tau_rate)
    residual += p.value(lagrangian.body, state) * tau_rate
    if g.xi_is_zero:
        return residual

    if form == "fp":
        momentum_rate = p.derivative_along(lambda s: p.value(lagrangian.d3, s), x, piece)
        return residual + momentum_rate * xi

    residual += p.value(lagrangian.d2, state) * xi
    if p.uses_z:
        d4 = p.value(lagrangian.d4, state)
        residual += d4 * p.outer_slope(x, piece) * xi
        if form == "direct":
            residual += d4 * _xi_after_q(p, g, x, piece)
        else:
            residual += xi * p.preimage_sum(lagrangian.d4, x)
    return residual


def scan_invariance(
    p: Problem,
    g: SymmetryGenerator,
    n_samples: int | None = None,
    form: InvarianceForm = "direct",
    *,
    tolerance: float | None = None,
) -> ResidualReport:
    which = "invariance" if form == "direct" else f"invariance-{form}"
    return scan(p, which, lambda x: invariance_residual(p, g, x, form), n_samples, tolerance)
