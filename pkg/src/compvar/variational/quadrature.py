"""Quadrature on smooth pieces: refined composite Simpson and cumulative integrals."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ..config.settings import settings
from ..core.exceptions import ValidationError
from ..expr.nodes import FloatArray
from ..utils.logging import get_logger

logger = get_logger("quadrature")


@dataclass(frozen=True)
class QuadratureSpec:
    """Refinement tolerance and panel budget of composite Simpson quadrature."""

    tol: float = settings.QUAD_TOL
    max_panels: int = settings.QUAD_MAX_PANELS


def simpson_panels(fn: Callable[[FloatArray], FloatArray], edges: FloatArray) -> float:
    """Simpson's rule on each panel [edges[i], edges[i+1]], summed."""
    lower, upper = edges[:-1], edges[1:]
    middle = 0.5 * (lower + upper)
    values = fn(np.concatenate([lower, middle, upper]))
    count = lower.size
    f_lower, f_middle, f_upper = values[:count], values[count : 2 * count], values[2 * count :]
    return float(np.sum((upper - lower) / 6.0 * (f_lower + 4.0 * f_middle + f_upper)))


def simpson(
    fn: Callable[[FloatArray], FloatArray],
    lower: float,
    upper: float,
    spec: QuadratureSpec | None = None,
) -> float:
    """Composite Simpson on [lower, upper], doubling panels until two totals agree.

    `fn` is evaluated on arrays of points; endpoints are included, so it must be
    evaluable on the closed interval.
    """
    quadrature = spec or QuadratureSpec()
    panels = 1
    previous = simpson_panels(fn, np.linspace(lower, upper, panels + 1))
    while True:
        panels *= 2
        current = simpson_panels(fn, np.linspace(lower, upper, panels + 1))
        if abs(current - previous) < quadrature.tol:
            logger.debug("Simpson on [%g, %g] converged with %d panels", lower, upper, panels)
            return current
        if panels >= quadrature.max_panels:
            logger.warning(
                "Simpson on [%g, %g] hit the panel budget (%d); last change %.3g",
                lower,
                upper,
                panels,
                abs(current - previous),
            )
            return current
        previous = current


class CumulativeIntegral:
    """F(x) = integral of `integrand` from `anchor` to x, tabulated on nodes.

    Each panel between consecutive nodes is integrated adaptively with
    `scipy.integrate.quad`, which never evaluates panel endpoints, so integrable
    endpoint singularities are allowed. Nodes must include every point where the
    integrand is not smooth; `at(x)` integrates from the nearest node.
    """

    def __init__(
        self,
        integrand: Callable[[float], float],
        nodes: Sequence[float],
        anchor: float,
        *,
        epsabs: float | None = None,
        epsrel: float | None = None,
        limit: int | None = None,
    ) -> None:
        self.integrand = integrand
        self.epsabs = epsabs if epsabs is not None else settings.QUAD_EPSABS
        self.epsrel = epsrel if epsrel is not None else settings.QUAD_EPSREL
        self.limit = limit if limit is not None else settings.QUAD_LIMIT

        ordered = np.unique(np.asarray([*nodes, anchor], dtype=np.float64))
        if ordered.size < 2:
            raise ValidationError("A cumulative integral needs at least two distinct nodes")
        self.nodes: FloatArray = ordered
        start = int(np.searchsorted(ordered, anchor))

        values = np.zeros_like(ordered)
        for i in range(start + 1, ordered.size):
            values[i] = values[i - 1] + self._panel(ordered[i - 1], ordered[i])
        for i in range(start - 1, -1, -1):
            values[i] = values[i + 1] - self._panel(ordered[i], ordered[i + 1])
        self.values: FloatArray = values

    def _panel(self, lower: float, upper: float) -> float:
        if lower == upper:
            return 0.0
        value, error = quad(self.integrand, lower, upper, epsabs=self.epsabs, epsrel=self.epsrel, limit=self.limit)
        if error > max(self.epsabs, self.epsrel * abs(value)) * 100:
            logger.debug("Panel [%g, %g] integral %.6g has error estimate %.3g", lower, upper, value, error)
        return float(value)

    def at(self, x: float) -> float:
        index = int(np.searchsorted(self.nodes, x))
        candidates = [i for i in (index - 1, index) if 0 <= i < self.nodes.size]
        nearest = min(candidates, key=lambda i: abs(self.nodes[i] - x))
        node = float(self.nodes[nearest])
        if node == x:
            return float(self.values[nearest])
        if x > node:
            return float(self.values[nearest]) + self._panel(node, x)
        return float(self.values[nearest]) - self._panel(x, node)
