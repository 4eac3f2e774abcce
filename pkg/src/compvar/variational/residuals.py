"""Pointwise residuals of the compositional Euler-Lagrange and DuBois-Reymond conditions."""

from collections.abc import Callable
from typing import Literal

import numpy as np

from ..config.constants import MIN_SCAN_SAMPLES
from ..config.settings import settings
from ..core.exceptions import ExcludedPointError, ValidationError
from ..core.models import ExcludedPoint, PieceNorm, ResidualReport
from ..utils.logging import get_logger
from .problem import Problem, State

logger = get_logger("residuals")

type ResidualKind = Literal["el", "dbr"]


def el_residual(p: Problem, x: float) -> float:
    """Euler-Lagrange residual with composition at x:

        d2L - d/dx d3L + d4L q'(q(x)) + sum over t in q^-1(x) of d4L(t) / |q'(t)|

    Raises ExcludedPointError when x, a probe or a preimage is too close to a breakpoint.
    """
    lagrangian = p.lagrangian
    piece = p.check_interior(x)
    state = p.state(x, piece)
    momentum_rate = p.derivative_along(lambda s: p.value(lagrangian.d3, s), x, piece)
    residual = p.value(lagrangian.d2, state) - momentum_rate
    if p.uses_z:
        residual += p.value(lagrangian.d4, state) * p.outer_slope(x, piece)
        residual += p.preimage_sum(lagrangian.d4, x)
    return residual


def energy(p: Problem, state: State) -> float:
    """L - d3L q' along the candidate."""
    lagrangian = p.lagrangian
    return p.value(lagrangian.body, state) - p.value(lagrangian.d3, state) * state.qd


def dbr_residual(p: Problem, x: float) -> float:
    """DuBois-Reymond residual with composition at x, left side minus right side:

    d/dx [L - d3L q'] - d1L + q'(x) * sum over t in q^-1(x) of d4L(t) / |q'(t)|
    """
    lagrangian = p.lagrangian
    piece = p.check_interior(x)
    state = p.state(x, piece)
    energy_rate = p.derivative_along(lambda s: energy(p, s), x, piece)
    residual = energy_rate - p.value(lagrangian.d1, state)
    if p.uses_z:
        residual += state.qd * p.preimage_sum(lagrangian.d4, x)
    return residual


def scan(
    p: Problem,
    which: str,
    residual: Callable[[float], float],
    n_samples: int | None = None,
    tolerance: float | None = None,
) -> ResidualReport:
    """Evaluate `residual` on a uniform grid of [a, b], recording excluded points."""
    count = n_samples if n_samples is not None else settings.RESIDUAL_SAMPLES
    if count < MIN_SCAN_SAMPLES:
        raise ValidationError(f"A residual scan needs at least {MIN_SCAN_SAMPLES} samples, got {count}")
    tol = tolerance if tolerance is not None else settings.RESIDUAL_TOL

    samples: list[float] = []
    values: list[float] = []
    excluded: list[ExcludedPoint] = []
    for x in np.linspace(p.a, p.b, count):
        point = float(x)
        try:
            value = residual(point)
        except ExcludedPointError as e:
            logger.debug("Excluded x=%.15g (%s): %s", point, e.reason, e)
            excluded.append(ExcludedPoint(x=point, reason=e.reason))
            continue
        samples.append(point)
        values.append(value)

    report = summarize(p, which, samples, values, excluded, tol)
    logger.info(
        "%s scan (%s): %d points, %d excluded, sup-norm %.3g",
        which,
        p.mode,
        len(samples),
        len(excluded),
        report.sup_norm,
    )
    return report


def summarize(
    p: Problem,
    which: str,
    samples: list[float],
    values: list[float],
    excluded: list[ExcludedPoint],
    tolerance: float,
) -> ResidualReport:
    residuals = np.asarray(values, dtype=np.float64)
    magnitudes = np.abs(residuals)
    sup_norm = float(magnitudes.max()) if residuals.size else 0.0
    rms = float(np.sqrt(np.mean(residuals**2))) if residuals.size else 0.0

    owners = np.asarray([p.piece_index(x) for x in samples], dtype=np.intp)
    pieces = []
    for index, piece in enumerate(p.pieces):
        local = magnitudes[owners == index]
        if local.size:
            pieces.append(
                PieceNorm(
                    lower=piece.lower,
                    upper=piece.upper,
                    sup_norm=float(local.max()),
                    rms=float(np.sqrt(np.mean(local**2))),
                    count=int(local.size),
                )
            )
    return ResidualReport(
        which=which,
        mode=p.mode,
        samples=samples,
        residuals=values,
        excluded=excluded,
        sup_norm=sup_norm,
        rms=rms,
        pieces=pieces,
        tolerance=tolerance,
        passed=bool(residuals.size) and sup_norm <= tolerance,
    )


def scan_residuals(
    p: Problem,
    which: ResidualKind = "el",
    n_samples: int | None = None,
    *,
    tolerance: float | None = None,
) -> ResidualReport:
    """Euler-Lagrange or DuBois-Reymond residuals at uniform points of [a, b]."""
    functions: dict[str, Callable[[Problem, float], float]] = {"el": el_residual, "dbr": dbr_residual}
    if which not in functions:
        raise ValidationError(f"Unknown residual '{which}'; expected one of {', '.join(functions)}")
    function = functions[which]
    return scan(p, which, lambda x: function(p, x), n_samples, tolerance)
