"""Compositional variational problems and their smooth-piece decomposition."""

import bisect
from collections.abc import Callable
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from ..config.settings import settings
from ..core.exceptions import DegenerateBranchError, ExcludedPointError, ValidationError
from ..dynamics.pwmap import (
    Branch,
    CompositionMode,
    PiecewiseMap,
    critical_points,
    map_eval,
    preimages,
    self_compose,
)
from ..expr.lagrangian import Lagrangian
from ..expr.nodes import Expr, FloatArray, evaluate, evaluate_array
from ..utils.logging import get_logger

logger = get_logger("problem")

type ExclusionReason = Literal["breakpoint", "preimage", "probe", "generator"]


@dataclass(frozen=True)
class BoundaryData:
    """Prescribed values q(a), q(b), z(a), z(b); any of them may be omitted."""

    q_a: float | None = None
    q_b: float | None = None
    z_a: float | None = None
    z_b: float | None = None


@dataclass(frozen=True)
class Piece:
    """A maximal sub-interval on which q, its derivative and z are all smooth.

    `outer` is the branch of q applied second in z = q(q(x)); it is None, like `z`,
    when the Lagrangian does not depend on z.
    """

    lower: float
    upper: float
    q: Branch
    z: Branch | None
    outer: Branch | None

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class State:
    """(x, q(x), q'(x), z(x)) along the candidate, one-sided at piece ends."""

    x: float
    q: float
    qd: float
    z: float

    def point(self) -> dict[str, float]:
        return {"x": self.x, "q": self.q, "qd": self.qd, "z": self.z}


class Problem:
    """Lagrangian, candidate extremal q and composition mode of a compositional problem.

    The composed map z = q(q(x)) is only built when the Lagrangian depends on z;
    otherwise the preimage sums vanish identically and q need not be a self-map.
    Boundary mismatches are logged as warnings, never raised.
    """

    def __init__(
        self,
        lagrangian: Lagrangian,
        candidate: PiecewiseMap,
        mode: CompositionMode = "actual",
        boundary: BoundaryData | None = None,
        *,
        interval: tuple[float, float] | None = None,
        margin: float | None = None,
        fd_step: float | None = None,
    ) -> None:
        if not lagrangian.is_compositional:
            raise ValidationError("A compositional problem needs a Lagrangian in (x, q, qd, z)")
        if mode not in ("actual", "per_branch"):
            raise ValidationError(f"Unknown composition mode '{mode}'")
        if interval is not None and not (
            np.isclose(interval[0], candidate.a) and np.isclose(interval[1], candidate.b)
        ):
            raise ValidationError(
                f"Interval [{interval[0]}, {interval[1]}] differs from the candidate domain "
                f"[{candidate.a}, {candidate.b}]"
            )

        self.lagrangian = lagrangian
        self.candidate = candidate
        self.mode = mode
        self.boundary = boundary
        self.a = candidate.a
        self.b = candidate.b
        self.margin = margin if margin is not None else settings.BREAKPOINT_MARGIN * (self.b - self.a)
        self.fd_step = fd_step if fd_step is not None else settings.FD_STEP * (self.b - self.a)
        self.uses_z = lagrangian.depends_on_z
        self.composed = self_compose(candidate, mode) if self.uses_z else None

        self.pieces = self._build_pieces()
        self._lowers = [piece.lower for piece in self.pieces]
        self.breakpoints = tuple(self._lowers[1:])
        self.boundary_warnings = self.check_boundary()
        for message in self.boundary_warnings:
            logger.warning(message)

    def _build_pieces(self) -> tuple[Piece, ...]:
        cuts = {self.a, self.b, *self.candidate.breakpoints}
        if self.composed is not None:
            cuts.update(self.composed.breakpoints)
        ordered = sorted(cuts)
        pieces = []
        for lower, upper in zip(ordered[:-1], ordered[1:], strict=True):
            mid = 0.5 * (lower + upper)
            q_branch = self.candidate.branch_at(mid)
            z_branch: Branch | None = None
            outer: Branch | None = None
            if self.composed is not None and self.composed.composition is not None:
                index = self.composed.branch_index(mid)
                z_branch = self.composed.branches[index]
                outer = self.candidate.branches[self.composed.composition[index][1]]
            pieces.append(Piece(lower, upper, q_branch, z_branch, outer))
        return tuple(pieces)

    def check_boundary(self, tol: float | None = None) -> list[str]:
        """Messages for every supplied boundary value the candidate misses."""
        if self.boundary is None:
            return []
        tolerance = tol if tol is not None else settings.BOUNDARY_TOL
        q_a = map_eval(self.candidate, self.a)
        q_b = map_eval(self.candidate, self.b)
        actual: dict[str, float | None] = {"q_a": q_a, "q_b": q_b, "z_a": None, "z_b": None}
        if self.candidate.self_composable:
            actual["z_a"] = map_eval(self.candidate, q_a)
            actual["z_b"] = map_eval(self.candidate, q_b)

        messages = []
        for name, expected in asdict(self.boundary).items():
            if expected is None:
                continue
            value = actual[name]
            if value is None:
                messages.append(f"Boundary value {name}={expected:g} cannot be checked: q is not self-composable")
            elif abs(value - expected) > tolerance:
                messages.append(f"Boundary value {name}={expected:g} does not match the candidate ({value:.15g})")
        return messages

    def piece_index(self, x: float) -> int:
        if not self.a <= x <= self.b:
            raise ValidationError(f"x={x!r} lies outside [{self.a}, {self.b}]")
        return min(bisect.bisect_right(self._lowers, x) - 1, len(self.pieces) - 1)

    def piece_at(self, x: float) -> Piece:
        return self.pieces[self.piece_index(x)]

    def state(self, x: float, piece: Piece | None = None) -> State:
        """State at x using the given piece's branches (one-sided at its ends)."""
        owner = piece if piece is not None else self.piece_at(x)
        z = owner.z.value(x) if owner.z is not None else 0.0
        return State(x, owner.q.value(x), owner.q.slope(x), z)

    def states(self, xs: npt.ArrayLike, piece: Piece) -> dict[str, FloatArray]:
        """Array form of `state` for points of one piece."""
        points = np.asarray(xs, dtype=np.float64)
        z = piece.z.values(points) if piece.z is not None else np.zeros_like(points)
        return {"x": points, "q": piece.q.values(points), "qd": piece.q.slopes(points), "z": z}

    def value(self, expr: Expr, state: State) -> float:
        return evaluate(expr, state.point())

    def values(self, expr: Expr, xs: npt.ArrayLike, piece: Piece) -> FloatArray:
        return evaluate_array(expr, self.states(xs, piece))

    def check_interior(self, x: float) -> Piece:
        """The piece owning x, refusing points within the margin of a or b or a breakpoint."""
        piece = self.piece_at(x)
        for end in (self.a, *self.breakpoints, self.b):
            if abs(x - end) < self.margin:
                raise ExcludedPointError(f"x={x!r} is within {self.margin:g} of {end!r}", x, end, "breakpoint")
        return piece

    def derivative_along(self, fn: Callable[[State], float], x: float, piece: Piece) -> float:
        """Central finite difference of fn along the candidate, both probes inside `piece`."""
        h = self.fd_step
        if x - h < piece.lower or x + h > piece.upper:
            end = piece.lower if x - h < piece.lower else piece.upper
            raise ExcludedPointError(f"Probe x={x!r}±{h:g} leaves its smooth piece", x, end, "probe")
        return (fn(self.state(x + h, piece)) - fn(self.state(x - h, piece))) / (2.0 * h)

    def outer_slope(self, x: float, piece: Piece) -> float:
        """q'(q(x)) using the branch that z applies second on this piece."""
        if piece.outer is None:
            return 0.0
        return piece.outer.slope(piece.q.value(x))

    def preimage_sum(self, expr: Expr, x: float, *, strict: bool = True) -> float:
        """Sum over t in q^-1(x) of expr(t, q(t), q'(t), z(t)) / |q'(t)|.

        In strict mode a preimage within the margin of a breakpoint excludes x.
        Identically zero when the Lagrangian does not depend on z.
        """
        if not self.uses_z:
            return 0.0
        total = 0.0
        for t in preimages(self.candidate, x):
            if strict:
                nearest = min(self.breakpoints, key=lambda c: abs(c - t), default=None)
                if nearest is not None and abs(t - nearest) < self.margin:
                    raise ExcludedPointError(
                        f"Preimage t={t!r} of x={x!r} is within {self.margin:g} of breakpoint {nearest!r}",
                        x,
                        nearest,
                        "preimage",
                    )
            state = self.state(t)
            slope = abs(state.qd)
            if slope < self.candidate.delta_min:
                raise DegenerateBranchError(f"|q'({t!r})| = {slope:.3g} is below {self.candidate.delta_min}")
            total += self.value(expr, state) / slope
        return total

    def critical_nodes(self) -> tuple[float, ...]:
        """Piece boundaries and the points where the preimage count of q changes."""
        nodes = set(self._lowers) | {self.b}
        if self.uses_z:
            nodes.update(critical_points(self.candidate))
        return tuple(sorted(n for n in nodes if self.a <= n <= self.b))
