"""Values of compositional functionals and of the chaos functional."""

from functools import partial

import numpy as np

from ..core.exceptions import ValidationError
from ..dynamics.fp import DensityFn, DensityMode, invariant_density
from ..dynamics.pwmap import PiecewiseMap
from ..utils.logging import get_logger
from .problem import Problem
from .quadrature import QuadratureSpec, simpson

logger = get_logger("functional")


def eval_functional(p: Problem, quad: QuadratureSpec | None = None) -> float:
    """Integral of L(x, q, q', z) over [a, b], piece by piece."""
    total = 0.0
    for piece in p.pieces:
        integrand = partial(p.values, p.lagrangian.body, piece=piece)
        total += simpson(integrand, piece.lower, piece.upper, quad)
    logger.debug("Functional value %.15g over %d pieces", total, len(p.pieces))
    return total


def chaos_functional(m: PiecewiseMap, f: DensityFn) -> float:
    """Integral of (m(t) - t)^2 f(t) over the domain of m.

    Panels run between the union of the density grid and the breakpoints of m, so
    the integrand is a polynomial of degree three on every panel when m is affine
    and Simpson's rule is exact.
    """
    if not (np.isclose(f.a, m.a) and np.isclose(f.b, m.b)):
        raise ValidationError(f"Density domain [{f.a}, {f.b}] differs from map domain [{m.a}, {m.b}]")
    edges = np.unique(np.concatenate([f.grid, np.asarray(m.breakpoints, dtype=np.float64)]))
    lower, upper = edges[:-1], edges[1:]
    middle = 0.5 * (lower + upper)
    owners = m.branch_indices(middle)

    total = 0.0
    for index, branch in enumerate(m.branches):
        mask = owners == index
        if not np.any(mask):
            continue
        points = np.stack([lower[mask], middle[mask], upper[mask]])
        values = (branch.values(points) - points) ** 2 * f.interpolate(points)
        widths = upper[mask] - lower[mask]
        total += float(np.sum(widths / 6.0 * (values[0] + 4.0 * values[1] + values[2])))
    return total


def chaos_objective(
    m: PiecewiseMap,
    n: int | None = None,
    mode: DensityMode = "cesaro",
    *,
    cells: int | None = None,
) -> float:
    """The chaos functional evaluated at the map's own invariant density."""
    result = invariant_density(m, n, mode, cells=cells)
    return chaos_functional(m, result.density)
