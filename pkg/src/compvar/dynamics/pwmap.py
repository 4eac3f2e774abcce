"""Piecewise-monotone, piecewise-smooth self-maps of an interval.

A `PiecewiseMap` represents both the dynamical maps whose invariant densities are
computed in `compvar.dynamics.fp` and the candidate extremals q(x) of a variational
problem. Branch ownership is half-open: branch i owns [u_i, v_i) and the final
branch also owns its right endpoint.
"""

import bisect
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from ..config.constants import MAX_BISECTION_STEPS
from ..config.settings import settings
from ..core.exceptions import (
    BreakpointProximityError,
    DomainError,
    ExpressionDomainError,
    ValidationError,
)
from ..expr.calculus import differentiate, substitute
from ..expr.nodes import Expr, FloatArray, evaluate, evaluate_array, free_variables, to_text
from ..expr.parser import parse
from ..utils.logging import get_logger

logger = get_logger("pwmap")

type CompositionMode = Literal["actual", "per_branch"]

# Relative slack for rounding when matching interval ends and closed-form preimages
_ROUNDING = 64 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class Branch:
    """One smooth monotone piece of a map, defined by an expression in x."""

    lower: float
    upper: float
    body: Expr
    derivative: Expr = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ValidationError(f"Branch interval [{self.lower}, {self.upper}] is empty")
        unknown = free_variables(self.body) - {"x"}
        if unknown:
            raise ValidationError(f"Branch body may only use x, found: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "derivative", differentiate(self.body, "x"))

    @property
    def is_affine(self) -> bool:
        return not free_variables(self.derivative)

    def value(self, x: float) -> float:
        return evaluate(self.body, {"x": x})

    def slope(self, x: float) -> float:
        return evaluate(self.derivative, {"x": x})

    def values(self, xs: npt.ArrayLike) -> FloatArray:
        return evaluate_array(self.body, {"x": xs})

    def slopes(self, xs: npt.ArrayLike) -> FloatArray:
        return evaluate_array(self.derivative, {"x": xs})

    def image(self) -> tuple[float, float]:
        """Closed image interval of a monotone branch."""
        ends = (self.value(self.lower), self.value(self.upper))
        return min(ends), max(ends)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def solve(self, ys: npt.ArrayLike) -> tuple[FloatArray, npt.NDArray[np.bool_]]:
        """Solve body(t) = y on the closed sub-interval for every y.

        Returns the solutions and a mask of the y values that have one. Affine
        branches are inverted in closed form, others by vectorised bisection.
        """
        targets = np.atleast_1d(np.asarray(ys, dtype=np.float64))
        slack = _ROUNDING * max(1.0, abs(self.lower), abs(self.upper))

        if self.is_affine:
            slope = evaluate(self.derivative, {})
            if slope == 0.0:
                return np.full_like(targets, np.nan), np.zeros(targets.shape, dtype=bool)
            ts = self.lower + (targets - self.value(self.lower)) / slope
            found = (ts >= self.lower - slack) & (ts <= self.upper + slack)
            return np.clip(ts, self.lower, self.upper), found

        low_value, high_value = self.value(self.lower), self.value(self.upper)
        increasing = high_value >= low_value
        image_slack = _ROUNDING * max(1.0, abs(low_value), abs(high_value))
        found = (targets >= min(low_value, high_value) - image_slack) & (
            targets <= max(low_value, high_value) + image_slack
        )
        lo = np.full_like(targets, self.lower)
        hi = np.full_like(targets, self.upper)
        for _ in range(MAX_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            below = self.values(mid) < targets
            move_up = below if increasing else ~below
            lo = np.where(move_up, mid, lo)
            hi = np.where(move_up, hi, mid)
            if np.all(hi - lo <= slack):
                break
        ts = 0.5 * (lo + hi)
        return ts, found


@dataclass(frozen=True)
class Preimage:
    """A solution t of m(t) = y together with the index of the branch it solves."""

    t: float
    branch: int


class PiecewiseMap:
    """Ordered branches partitioning [a, b].

    `self_composable` asserts that every branch image lies in [a, b], so the map can
    be composed with itself. Candidate curves of classical problems are not interval
    maps and may pass `check_monotone=False`.
    """

    def __init__(
        self,
        branches: Sequence[Branch],
        *,
        self_composable: bool = False,
        check_monotone: bool = True,
        delta_min: float | None = None,
        check_points: int | None = None,
        composition: Sequence[tuple[int, int]] | None = None,
    ) -> None:
        if not branches:
            raise ValidationError("A piecewise map needs at least one branch")
        self.delta_min = delta_min if delta_min is not None else settings.DELTA_MIN
        self.branches = self._snap(branches)
        self.a = self.branches[0].lower
        self.b = self.branches[-1].upper
        self.self_composable = self_composable
        self._lowers = [branch.lower for branch in self.branches]
        # (inner, outer) branch indices of the map this one was composed from
        self.composition = tuple(composition) if composition is not None else None

        if check_monotone:
            points = check_points if check_points is not None else settings.MONOTONE_CHECK_POINTS
            for index, branch in enumerate(self.branches):
                self._check_monotone(index, branch, points)
        if self_composable:
            self._check_self_map()

    @staticmethod
    def _snap(branches: Sequence[Branch]) -> tuple[Branch, ...]:
        span = branches[-1].upper - branches[0].lower
        snapped = [branches[0]]
        for branch in branches[1:]:
            previous = snapped[-1]
            gap = branch.lower - previous.upper
            if abs(gap) > _ROUNDING * max(1.0, abs(span)):
                kind = "gap" if gap > 0 else "overlap"
                raise ValidationError(
                    f"Branches do not partition the domain: {kind} between {previous.upper} and {branch.lower}"
                )
            if gap != 0.0:
                branch = Branch(previous.upper, branch.upper, branch.body)
            snapped.append(branch)
        return tuple(snapped)

    def _check_monotone(self, index: int, branch: Branch, points: int) -> None:
        grid = np.linspace(branch.lower, branch.upper, points + 2)[1:-1]
        try:
            slopes = branch.slopes(grid)
        except ExpressionDomainError as e:
            raise ValidationError(f"Branch {index} derivative is not evaluable on its interval: {e}") from e
        if np.any(np.abs(slopes) < self.delta_min):
            raise ValidationError(f"Branch {index} ('{to_text(branch.body)}') has |derivative| below {self.delta_min}")
        if not (np.all(slopes > 0) or np.all(slopes < 0)):
            raise ValidationError(f"Branch {index} ('{to_text(branch.body)}') is not monotone")

    def _check_self_map(self) -> None:
        slack = _ROUNDING * max(1.0, abs(self.a), abs(self.b))
        for index, branch in enumerate(self.branches):
            grid = np.linspace(branch.lower, branch.upper, settings.MONOTONE_CHECK_POINTS + 2)
            try:
                values = branch.values(grid)
            except ExpressionDomainError as e:
                raise ValidationError(f"Branch {index} is not evaluable on its interval: {e}") from e
            if values.min() < self.a - slack or values.max() > self.b + slack:
                raise ValidationError(
                    f"Branch {index} image [{values.min():.6g}, {values.max():.6g}] leaves the domain "
                    f"[{self.a:.6g}, {self.b:.6g}]; the map is not self-composable"
                )

    @classmethod
    def from_records(
        cls,
        records: Sequence[tuple[tuple[float, float], str]],
        *,
        self_composable: bool = False,
        check_monotone: bool = True,
        delta_min: float | None = None,
    ) -> "PiecewiseMap":
        """Build a map from ((u, v), "expression in x") records."""
        branches = [Branch(float(u), float(v), parse(source, ("x",))) for (u, v), source in records]
        return cls(branches, self_composable=self_composable, check_monotone=check_monotone, delta_min=delta_min)

    @classmethod
    def identity(cls, a: float = 0.0, b: float = 1.0) -> "PiecewiseMap":
        return cls.from_records([((a, b), "x")], self_composable=True)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior branch boundaries."""
        return tuple(self._lowers[1:])

    @property
    def boundaries(self) -> tuple[float, ...]:
        return (self.a, *self.breakpoints, self.b)

    def __len__(self) -> int:
        return len(self.branches)

    def __repr__(self) -> str:
        pieces = ", ".join(f"[{br.lower:g}, {br.upper:g}): {to_text(br.body)}" for br in self.branches)
        return f"PiecewiseMap({pieces})"

    def branch_index(self, x: float) -> int:
        if not self.a <= x <= self.b:
            raise DomainError(f"x={x!r} lies outside the domain [{self.a}, {self.b}]")
        return min(bisect.bisect_right(self._lowers, x) - 1, len(self.branches) - 1)

    def branch_indices(self, xs: npt.ArrayLike) -> npt.NDArray[np.intp]:
        points = np.asarray(xs, dtype=np.float64)
        if np.any((points < self.a) | (points > self.b)):
            raise DomainError(f"Points outside the domain [{self.a}, {self.b}]")
        indices = np.searchsorted(np.asarray(self._lowers), points, side="right") - 1
        return np.minimum(indices, len(self.branches) - 1)

    def branch_at(self, x: float) -> Branch:
        return self.branches[self.branch_index(x)]

    def margin(self, relative: float | None = None) -> float:
        """Absolute breakpoint exclusion margin for this domain."""
        fraction = relative if relative is not None else settings.BREAKPOINT_MARGIN
        return fraction * (self.b - self.a)

    def nearest_breakpoint(self, x: float) -> float | None:
        if not self.breakpoints:
            return None
        return min(self.breakpoints, key=lambda c: abs(c - x))


def map_eval(m: PiecewiseMap, x: float) -> float:
    """Value of the branch owning x."""
    return m.branch_at(x).value(x)


def map_eval_array(m: PiecewiseMap, xs: npt.ArrayLike) -> FloatArray:
    """Vectorised `map_eval` with the same ownership convention."""
    points = np.asarray(xs, dtype=np.float64)
    indices = m.branch_indices(points)
    result = np.empty_like(points)
    for index, branch in enumerate(m.branches):
        mask = indices == index
        if np.any(mask):
            result[mask] = branch.values(points[mask])
    return result


def map_deriv(m: PiecewiseMap, x: float, margin: float | None = None) -> float:
    """Derivative of the owning branch; refused within the margin of a breakpoint."""
    delta = margin if margin is not None else m.margin()
    nearest = m.nearest_breakpoint(x)
    if nearest is not None and abs(x - nearest) < delta:
        raise BreakpointProximityError(
            f"x={x!r} is within {delta:g} of breakpoint {nearest!r}; the derivative may jump there", x, nearest
        )
    return m.branch_at(x).slope(x)


def preimages_closed(m: PiecewiseMap, y: float, tol: float | None = None) -> list[Preimage]:
    """Solutions of branch(t) = y on every branch closure, with their branch index.

    A point where two branch closures meet can be returned once per branch, which
    is what one-sided sums over preimages need.
    """
    result: list[Preimage] = []
    for index, branch in enumerate(m.branches):
        ts, found = branch.solve([y])
        if found[0] and _accurate(branch, float(ts[0]), y, tol):
            result.append(Preimage(float(ts[0]), index))
    return result


def preimages(m: PiecewiseMap, y: float, tol: float | None = None) -> list[float]:
    """The set m^-1(y) under the half-open ownership convention, in increasing order."""
    last = len(m.branches) - 1
    result = [
        pre.t
        for pre in preimages_closed(m, y, tol)
        if pre.t < m.branches[pre.branch].upper or pre.branch == last
    ]
    return sorted(result)


def _accurate(branch: Branch, t: float, y: float, tol: float | None) -> bool:
    tolerance = tol if tol is not None else settings.PREIMAGE_TOL
    try:
        residual = abs(branch.value(t) - y)
    except ExpressionDomainError:
        return False
    scale = max(1.0, abs(y))
    if residual > tolerance * scale:
        logger.debug("Rejected preimage t=%r of y=%r: residual %.3g", t, y, residual)
        return False
    return True


def self_compose(m: PiecewiseMap, mode: CompositionMode = "actual") -> PiecewiseMap:
    """The map x -> m(m(x)) as a piecewise map with smooth pieces.

    In mode "actual" the composed breakpoints are the original ones together with
    their preimages, and each piece fixes the inner and the outer branch (the
    outer branch is chosen at the piece midpoint). In mode "per_branch" branch i
    is composed with itself over its whole sub-interval.
    """
    if not m.self_composable:
        raise ValidationError("Map is not flagged self_composable; m(m(x)) is undefined")

    if mode == "per_branch":
        branches = [Branch(br.lower, br.upper, substitute(br.body, {"x": br.body})) for br in m.branches]
        pairs = [(i, i) for i in range(len(m.branches))]
        return PiecewiseMap(branches, check_monotone=False, delta_min=m.delta_min, composition=pairs)
    if mode != "actual":
        raise ValidationError(f"Unknown composition mode '{mode}'")

    cuts = {m.a, m.b, *m.breakpoints}
    for breakpoint in m.breakpoints:
        cuts.update(pre.t for pre in preimages_closed(m, breakpoint))
    ordered = _dedupe(sorted(cuts), _ROUNDING * max(1.0, m.b - m.a))

    pieces: list[tuple[float, float, int, int]] = []
    for lower, upper in zip(ordered[:-1], ordered[1:], strict=True):
        mid = 0.5 * (lower + upper)
        inner = m.branch_index(mid)
        image = min(max(m.branches[inner].value(mid), m.a), m.b)
        outer = m.branch_index(image)
        if pieces and pieces[-1][2:] == (inner, outer):
            pieces[-1] = (pieces[-1][0], upper, inner, outer)
        else:
            pieces.append((lower, upper, inner, outer))

    branches = [
        Branch(lower, upper, substitute(m.branches[outer].body, {"x": m.branches[inner].body}))
        for lower, upper, inner, outer in pieces
    ]
    logger.debug("Composed %d branches into %d pieces", len(m.branches), len(branches))
    return PiecewiseMap(
        branches,
        check_monotone=False,
        delta_min=m.delta_min,
        composition=[(inner, outer) for _, _, inner, outer in pieces],
    )


def _dedupe(points: list[float], slack: float) -> list[float]:
    result = [points[0]]
    for point in points[1:]:
        if point - result[-1] > slack:
            result.append(point)
    if result[-1] != points[-1]:
        result[-1] = points[-1]
    return result


@dataclass(frozen=True)
class Orbit:
    """Points x0, m(x0), ..., m^n(x0) and the steps whose iterate was clamped into [a, b]."""

    points: list[float]
    clamped: tuple[int, ...] = ()

    @property
    def was_clamped(self) -> bool:
        return bool(self.clamped)


def orbit(m: PiecewiseMap, x0: float, n: int) -> Orbit:
    """Orbit of x0 of length n; iterates that round out of the domain are clamped and recorded."""
    if not m.self_composable:
        raise ValidationError("Orbits need a self-composable map")
    if n < 0:
        raise ValidationError(f"Orbit length must be nonnegative, got {n}")
    m.branch_index(x0)
    points = [x0]
    clamped: list[int] = []
    current = x0
    for step in range(1, n + 1):
        current = map_eval(m, current)
        if not m.a <= current <= m.b:
            logger.warning("Orbit iterate %d = %r left [%g, %g]; clamped", step, current, m.a, m.b)
            current = min(max(current, m.a), m.b)
            clamped.append(step)
        points.append(current)
    return Orbit(points, tuple(clamped))


def orbit_ensemble(m: PiecewiseMap, starts: npt.ArrayLike, n: int, transient: int = 0) -> FloatArray:
    """Iterates 1..n (after `transient` discarded steps) of many orbits at once.

    Returns an array of shape (n, len(starts)).
    """
    if not m.self_composable:
        raise ValidationError("Orbits need a self-composable map")
    current = np.asarray(starts, dtype=np.float64).copy()
    history = np.empty((n, current.size), dtype=np.float64)
    clamped = 0
    for step in range(transient + n):
        current = map_eval_array(m, current)
        outside = (current < m.a) | (current > m.b)
        if np.any(outside):
            clamped += int(np.count_nonzero(outside))
            current = np.clip(current, m.a, m.b)
        if step >= transient:
            history[step - transient] = current
    if clamped:
        logger.warning("Clamped %d orbit iterates back into [%g, %g]", clamped, m.a, m.b)
    return history


def critical_points(m: PiecewiseMap) -> tuple[float, ...]:
    """One-sided images of branch ends inside the domain, where preimage counts can change."""
    values: set[float] = set()
    for branch in m.branches:
        for end in (branch.lower, branch.upper):
            try:
                value = branch.value(end)
            except ExpressionDomainError:
                continue
            if m.a <= value <= m.b:
                values.add(value)
    return tuple(sorted(values))
