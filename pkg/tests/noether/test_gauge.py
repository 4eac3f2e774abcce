"""Tests for the gauge term and conservation checks."""

import numpy as np
import pytest

from compvar.dynamics.pwmap import PiecewiseMap
from compvar.expr import Lagrangian
from compvar.noether.gauge import conservation_check, conserved_quantity, gauge_f, gauge_nodes
from compvar.noether.generator import SymmetryGenerator
from compvar.noether.invariance import invariance_residual
from compvar.noether.symmetries import solve_tau_ode
from compvar.variational.problem import Problem

SYMMETRY = "x^(-1/3)"


class TestGauge:
    """f(x) = integral from a of tau q' sum d4L/|q'|."""

    def test_worked_example_closed_form(self, per_branch_problem: Problem) -> None:
        f = gauge_f(per_branch_problem, SymmetryGenerator.parse(SYMMETRY))
        assert f.at(0.0) == 0.0
        for x in [0.05, 0.3, 0.5, 0.77, 1.0]:
            assert f.at(x) == pytest.approx(-(x ** (2.0 / 3.0)), abs=1e-9)

    def test_linear_in_tau(self, per_branch_problem: Problem) -> None:
        first = gauge_f(per_branch_problem, SymmetryGenerator.parse("1"))
        second = gauge_f(per_branch_problem, SymmetryGenerator.parse("x"))
        combined = gauge_f(per_branch_problem, SymmetryGenerator.parse("2 - 3*x"))
        for x in [0.2, 0.6, 0.9]:
            assert combined.at(x) == pytest.approx(2.0 * first.at(x) - 3.0 * second.at(x), abs=1e-10)

    def test_nodes_include_critical_points(self, actual_problem: Problem) -> None:
        nodes = gauge_nodes(actual_problem, 11)
        for point in (0.0, 0.25, 0.5, 0.75, 1.0):
            assert min(abs(node - point) for node in nodes) < 1e-15
        assert nodes == sorted(nodes)

    def test_vanishes_without_z(self) -> None:
        curve = PiecewiseMap.from_records([((0.0, 1.0), "x")])
        p = Problem(Lagrangian.parse("qd^2/2"), curve)
        f = gauge_f(p, SymmetryGenerator.parse("1"))
        assert f.integral is None
        assert f.at(0.4) == 0.0
        np.testing.assert_array_equal(f.values, 0.0)


class TestConservedQuantity:
    """C = (L - d3L q') tau + d3L xi + f."""

    def test_worked_example_vanishes(self, per_branch_problem: Problem) -> None:
        g = SymmetryGenerator.parse(SYMMETRY)
        f = gauge_f(per_branch_problem, g)
        for x in [0.1, 0.4, 0.6, 0.9]:
            assert conserved_quantity(per_branch_problem, g, f, x) == pytest.approx(0.0, abs=1e-9)

    def test_energy_of_free_particle(self) -> None:
        curve = PiecewiseMap.from_records([((0.0, 1.0), "x")])
        p = Problem(Lagrangian.parse("qd^2/2"), curve)
        g = SymmetryGenerator.parse("1")
        assert conserved_quantity(p, g, gauge_f(p, g), 0.5) == pytest.approx(-0.5)

    def test_scale_equivariance(self, per_branch_problem: Problem) -> None:
        g = SymmetryGenerator.parse("1")
        scaled = g.scaled(2.5)
        f, f_scaled = gauge_f(per_branch_problem, g), gauge_f(per_branch_problem, scaled)
        for x in [0.2, 0.7]:
            assert conserved_quantity(per_branch_problem, scaled, f_scaled, x) == pytest.approx(
                2.5 * conserved_quantity(per_branch_problem, g, f, x), abs=1e-10
            )


class TestConservationCheck:
    """Per-piece spread of C against a relative tolerance."""

    def test_worked_example_is_conserved(self, per_branch_problem: Problem) -> None:
        report = conservation_check(per_branch_problem, SymmetryGenerator.parse(SYMMETRY))
        assert report.passed
        assert report.verdict == "conserved"
        assert report.max_abs_c <= 1e-8
        assert [piece.count for piece in report.pieces_variation] == [50, 50]
        assert report.tau == "x^(-1 / 3)"
        assert report.gauge_nodes[0] == 0.0

    def test_translation_is_not_conserved(self, per_branch_problem: Problem) -> None:
        """With tau = 1, C = x/3 along the extremal."""
        report = conservation_check(per_branch_problem, SymmetryGenerator.parse("1"))
        assert not report.passed
        assert report.verdict == "not conserved"
        assert report.dc_dx_sup == pytest.approx(1.0 / 3.0, abs=1e-6)

    def test_actual_mode_is_not_conserved(self, actual_problem: Problem) -> None:
        report = conservation_check(actual_problem, SymmetryGenerator.parse(SYMMETRY))
        assert not report.passed
        assert len(report.pieces_variation) == 4

    def test_sampled_tau_reported(self, per_branch_problem: Problem) -> None:
        report = conservation_check(per_branch_problem, solve_tau_ode(per_branch_problem))
        assert report.passed
        assert report.tau_table is not None
        assert report.tau_table.x_ref == 1.0

    def test_short_piece_is_flagged(self) -> None:
        curve = PiecewiseMap.from_records([((0.0, 0.5), "x"), ((0.5, 0.5 + 1e-7), "x"), ((0.5 + 1e-7, 1.0), "x")])
        p = Problem(Lagrangian.parse("qd^2/2"), curve)
        report = conservation_check(p, SymmetryGenerator.parse("1"))
        flags = [piece.flagged for piece in report.pieces_variation]
        assert flags == [False, True, False]
        assert report.passed


class TestNoetherIdentity:
    """Along an extremal dC/dx equals the fp form of the invariance residual."""

    @pytest.mark.parametrize(("tau", "xi"), [("1", "0"), ("x^2", "0"), ("1 + x", "x*q"), (SYMMETRY, "0")])
    def test_rate_of_conserved_quantity(self, per_branch_problem: Problem, tau: str, xi: str) -> None:
        g = SymmetryGenerator.parse(tau, xi)
        p = per_branch_problem
        f = gauge_f(p, g)
        h = 1e-5
        for x in [0.15, 0.35, 0.62, 0.85]:
            rate = (conserved_quantity(p, g, f, x + h) - conserved_quantity(p, g, f, x - h)) / (2 * h)
            assert rate == pytest.approx(invariance_residual(p, g, x, "fp"), abs=1e-7)

    def test_check_reports_the_invariance_residual(self, per_branch_problem: Problem) -> None:
        """L = x along the extremal, so tau = x^2 gives the residual x^2/3 + 2x^2 = 7x^2/3."""
        g = SymmetryGenerator.parse("x^2")
        report = conservation_check(per_branch_problem, g)
        expected = max(abs(invariance_residual(per_branch_problem, g, x, "fp")) for x in report.samples)
        assert expected == pytest.approx(7.0 / 3.0 * max(report.samples) ** 2, rel=1e-9)
        assert report.dc_dx_sup == pytest.approx(expected, rel=1e-6)
