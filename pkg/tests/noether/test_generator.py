"""Tests for symmetry generators."""

import pytest

from compvar.core.exceptions import UnknownVariableError, ValidationError
from compvar.expr import parse
from compvar.noether.generator import SymmetryGenerator
from compvar.noether.symmetries import solve_tau_ode
from compvar.variational.problem import Problem


class TestSymmetryGenerator:
    """Closed-form generators."""

    def test_parse_defaults(self) -> None:
        g = SymmetryGenerator.parse()
        assert g.tau_is_zero
        assert g.xi_is_zero
        assert g.is_x_only
        assert not g.is_sampled

    def test_rates_use_chain_rule(self) -> None:
        g = SymmetryGenerator.parse("x*q", "q^2")
        # tau' = q + x qd, xi' = 2 q qd
        assert g.tau_rate(2.0, 3.0, 0.5) == pytest.approx(3.0 + 1.0)
        assert g.xi_rate(2.0, 3.0, 0.5) == pytest.approx(3.0)
        assert not g.is_x_only

    def test_z_is_not_a_generator_variable(self) -> None:
        with pytest.raises(UnknownVariableError):
            SymmetryGenerator.parse("z")

    def test_constructed_tree_is_checked(self) -> None:
        with pytest.raises(ValidationError):
            SymmetryGenerator(tau=parse("qd", ("x", "q", "qd")))

    def test_combine(self) -> None:
        basis_tau = [parse("1", ("x",)), parse("x", ("x",))]
        basis_xi = [parse("q", ("q",))]
        g = SymmetryGenerator.combine([2.0, 0.0, -1.0], basis_tau, basis_xi)
        assert g.tau_at(0.7, 0.0) == pytest.approx(2.0)
        assert g.xi_at(0.7, 5.0) == pytest.approx(-5.0)

    def test_combine_size_mismatch(self) -> None:
        with pytest.raises(ValidationError):
            SymmetryGenerator.combine([1.0], [], [])

    def test_scaled(self) -> None:
        g = SymmetryGenerator.parse("x^(-1/3)", "q").scaled(3.0)
        assert g.tau_at(0.125, 1.0) == pytest.approx(6.0)
        assert g.xi_at(0.125, 1.0) == pytest.approx(3.0)

    def test_text(self) -> None:
        g = SymmetryGenerator.parse("x^(-1/3)")
        assert g.tau_text == "x^(-1 / 3)"
        assert g.xi_text == "0"


class TestSampledGenerator:
    """Generators carrying a tau table from the reduced ODE."""

    def test_sampled_from_ode(self, per_branch_problem: Problem) -> None:
        g = solve_tau_ode(per_branch_problem, 1.0)
        assert g.is_sampled
        assert g.is_x_only
        assert g.xi_is_zero
        assert not g.tau_is_zero
        assert g.tau_text.startswith("sampled(x_ref=1")
        assert g.tau_at(1.0, 0.0) == pytest.approx(1.0)

    def test_sampled_scaled(self, per_branch_problem: Problem) -> None:
        g = solve_tau_ode(per_branch_problem, 1.0)
        scaled = g.scaled(2.0)
        assert scaled.tau_at(0.3, 0.0) == pytest.approx(2.0 * g.tau_at(0.3, 0.0))
        assert scaled.tau_rate(0.3, 0.0, 0.0) == pytest.approx(2.0 * g.tau_rate(0.3, 0.0, 0.0))

    def test_sampled_needs_zero_xi(self, per_branch_problem: Problem) -> None:
        table = solve_tau_ode(per_branch_problem, 1.0).table
        assert table is not None
        with pytest.raises(ValidationError):
            SymmetryGenerator(xi=parse("q", ("q",)), table=table)
