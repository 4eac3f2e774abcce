"""Tests for the invariance condition with composition."""

import pytest

from compvar.core.exceptions import ExcludedPointError, ValidationError
from compvar.dynamics.pwmap import PiecewiseMap
from compvar.expr import Lagrangian
from compvar.noether.generator import SymmetryGenerator
from compvar.noether.invariance import invariance_residual, scan_invariance
from compvar.variational.problem import Problem

SAMPLE_POINTS = [0.1, 0.3, 0.4, 0.6, 0.9]


class TestWorkedExample:
    """tau = x^(-1/3) leaves the worked Lagrangian invariant on its extremal."""

    @pytest.mark.parametrize("form", ["direct", "fp", "preimage"])
    @pytest.mark.parametrize("x", SAMPLE_POINTS)
    def test_symmetry(self, per_branch_problem: Problem, form: str, x: float) -> None:
        g = SymmetryGenerator.parse("x^(-1/3)")
        value = invariance_residual(per_branch_problem, g, x, form)  # type: ignore[arg-type]
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_translation_is_not_a_symmetry(self, per_branch_problem: Problem) -> None:
        g = SymmetryGenerator.parse("1")
        assert invariance_residual(per_branch_problem, g, 0.4, "fp") == pytest.approx(1.0 / 3.0)

    def test_zero_generator(self, per_branch_problem: Problem) -> None:
        assert invariance_residual(per_branch_problem, SymmetryGenerator.parse(), 0.4) == 0.0

    def test_xi_vanishing_at_the_point(self, per_branch_problem: Problem) -> None:
        """xi = x - 0.4 vanishes at 0.4 but xi(q(0.4)) = -0.2 still enters the direct form."""
        g = SymmetryGenerator.parse("0", "x - 0.4")
        at_zero = invariance_residual(per_branch_problem, g, 0.4)
        assert at_zero == pytest.approx((0.2 - 0.4) / 3.0, rel=1e-12)
        assert invariance_residual(per_branch_problem, g, 0.4 + 1e-7) == pytest.approx(at_zero, abs=1e-6)

    def test_actual_mode_breaks_symmetry_on_outer_pieces(self, actual_problem: Problem) -> None:
        """On [0, 1/4] the actual composition gives L = (3x + 1)/3 instead of x."""
        g = SymmetryGenerator.parse("x^(-1/3)")
        x = 0.1
        expected = x ** (-1.0 / 3.0) / 3.0 - (3 * x + 1) / 3.0 * x ** (-4.0 / 3.0) / 3.0
        assert invariance_residual(actual_problem, g, x, "fp") == pytest.approx(expected, rel=1e-9)
        assert invariance_residual(actual_problem, g, 0.4, "fp") == pytest.approx(0.0, abs=1e-12)

    def test_scan(self, per_branch_problem: Problem) -> None:
        report = scan_invariance(per_branch_problem, SymmetryGenerator.parse("x^(-1/3)"), 200, "fp", tolerance=1e-8)
        assert report.passed
        assert report.which == "invariance-fp"
        assert report.excluded[0].x == 0.0

    def test_generator_singularity_is_excluded(self) -> None:
        """tau = 1/(x - 0.3) is not evaluable at 0.3, which is not a breakpoint."""
        curve = PiecewiseMap.from_records([((0.0, 1.0), "x")])
        p = Problem(Lagrangian.parse("qd^2/2"), curve)
        with pytest.raises(ExcludedPointError) as exc_info:
            invariance_residual(p, SymmetryGenerator.parse("1/(x - 0.3)"), 0.3)
        assert exc_info.value.reason == "generator"


class TestForms:
    """The three forms of the condition."""

    def test_forms_agree_with_xi_on_extremal(self, per_branch_problem: Problem) -> None:
        """With q-translations xi = 1 the forms agree wherever the Euler-Lagrange residual vanishes."""
        g = SymmetryGenerator.parse("0", "1")
        direct = invariance_residual(per_branch_problem, g, 0.4, "direct")
        fp = invariance_residual(per_branch_problem, g, 0.4, "fp")
        preimage = invariance_residual(per_branch_problem, g, 0.4, "preimage")
        assert fp == pytest.approx(preimage, abs=1e-9)
        assert direct == pytest.approx(preimage, abs=1e-9)

    def test_unknown_form(self, per_branch_problem: Problem) -> None:
        with pytest.raises(ValidationError):
            invariance_residual(per_branch_problem, SymmetryGenerator.parse("1"), 0.4, "weak")  # type: ignore[arg-type]
