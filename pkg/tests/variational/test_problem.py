"""Tests for compositional problems and their smooth pieces."""

import logging

import pytest

from compvar.core.exceptions import ExcludedPointError, ValidationError
from compvar.dynamics.pwmap import PiecewiseMap
from compvar.expr import Lagrangian
from compvar.tools.worked_example import worked_example_map
from compvar.variational.problem import BoundaryData, Problem


class TestPieces:
    """Pieces are cut at breakpoints of q and of z."""

    def test_per_branch_pieces(self, per_branch_problem: Problem) -> None:
        assert [(piece.lower, piece.upper) for piece in per_branch_problem.pieces] == [(0.0, 0.5), (0.5, 1.0)]
        assert per_branch_problem.breakpoints == (0.5,)

    def test_actual_pieces(self, actual_problem: Problem) -> None:
        bounds = [(piece.lower, piece.upper) for piece in actual_problem.pieces]
        assert bounds == pytest.approx([(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)])

    def test_state(self, actual_problem: Problem) -> None:
        state = actual_problem.state(0.1)
        assert (state.q, state.qd, state.z) == pytest.approx((0.8, -2.0, 0.4))

    def test_outer_slope(self, actual_problem: Problem) -> None:
        piece = actual_problem.piece_at(0.1)
        assert actual_problem.outer_slope(0.1, piece) == -2.0

    def test_z_free_lagrangian_skips_composition(self) -> None:
        curve = PiecewiseMap.from_records([((0.0, 1.0), "3*x")])
        p = Problem(Lagrangian.parse("qd^2/2"), curve)
        assert p.composed is None
        assert p.state(0.5).z == 0.0
        assert p.preimage_sum(p.lagrangian.d4, 0.5) == 0.0

    def test_classical_lagrangian_rejected(self, worked_map: PiecewiseMap) -> None:
        with pytest.raises(ValidationError):
            Problem(Lagrangian.classical("qd^2"), worked_map)

    def test_interval_must_match(self, worked_map: PiecewiseMap) -> None:
        with pytest.raises(ValidationError):
            Problem(Lagrangian.parse("z"), worked_map, interval=(0.0, 2.0))


class TestExclusion:
    """Points near breakpoints are refused, with a reason."""

    def test_near_breakpoint(self, per_branch_problem: Problem) -> None:
        with pytest.raises(ExcludedPointError) as exc_info:
            per_branch_problem.check_interior(0.5)
        assert exc_info.value.reason == "breakpoint"

    def test_preimage_near_breakpoint(self, per_branch_problem: Problem) -> None:
        """x = 0 has the preimage t = 1/2, a breakpoint of q."""
        with pytest.raises(ExcludedPointError) as exc_info:
            per_branch_problem.preimage_sum(per_branch_problem.lagrangian.d4, 1e-7)
        assert exc_info.value.reason == "preimage"

    def test_probe_leaving_piece(self, per_branch_problem: Problem) -> None:
        piece = per_branch_problem.piece_at(0.25)
        with pytest.raises(ExcludedPointError) as exc_info:
            per_branch_problem.derivative_along(lambda s: s.q, piece.upper - 1e-9, piece)
        assert exc_info.value.reason == "probe"


class TestPreimageSum:
    """Sums over q^-1(x) weighted by 1/|q'(t)|."""

    def test_worked_example(self, per_branch_problem: Problem) -> None:
        assert per_branch_problem.preimage_sum(per_branch_problem.lagrangian.d4, 0.4) == pytest.approx(1.0 / 3.0)

    def test_critical_nodes(self, actual_problem: Problem) -> None:
        assert actual_problem.critical_nodes() == pytest.approx((0.0, 0.25, 0.5, 0.75, 1.0))


class TestBoundary:
    """Boundary mismatches are warnings."""

    def test_matching_boundary(self, per_branch_problem: Problem) -> None:
        assert per_branch_problem.boundary_warnings == []

    def test_mismatch_is_logged(self, caplog: pytest.LogCaptureFixture) -> None:
        boundary = BoundaryData(q_a=0.0, z_b=1.0)
        with caplog.at_level(logging.WARNING):
            p = Problem(Lagrangian.parse("(x + q + z)/3"), worked_example_map(), "per_branch", boundary)
        assert len(p.boundary_warnings) == 1
        assert "q_a" in p.boundary_warnings[0]
        assert "q_a" in caplog.text
