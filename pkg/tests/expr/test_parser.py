"""Tests for expression parsing and printing."""

import math

import pytest

from compvar.config.constants import COMPOSITIONAL_VARIABLES
from compvar.core.exceptions import (
    ExpressionDomainError,
    ExpressionSyntaxError,
    UnknownFunctionError,
    UnknownVariableError,
)
from compvar.expr import Binary, Const, Unary, Var, evaluate, evaluate_array, free_variables, parse, to_text

VARS = COMPOSITIONAL_VARIABLES


class TestParse:
    """Grammar and precedence."""

    def test_number_and_variable(self) -> None:
        assert parse("2.5", VARS) == Const(2.5)
        assert parse("qd", VARS) == Var("qd")
        assert parse("1e-3", VARS) == Const(0.001)

    def test_power_binds_tighter_than_minus(self) -> None:
        """-x^2 is -(x^2), not (-x)^2."""
        tree = parse("-x^2", VARS)
        assert tree == Unary("neg", Binary("^", Var("x"), Const(2.0)))
        assert evaluate(tree, {"x": 3.0}) == -9.0

    def test_negative_exponent(self) -> None:
        tree = parse("x^-2", VARS)
        assert evaluate(tree, {"x": 2.0}) == pytest.approx(0.25)

    def test_left_associative_division(self) -> None:
        assert evaluate(parse("8/4/2", VARS), {}) == 1.0
        assert evaluate(parse("8-4-2", VARS), {}) == 2.0

    def test_functions(self) -> None:
        tree = parse("sin(x) + exp(ln(q)) + sqrt(z) + abs(-qd)", VARS)
        value = evaluate(tree, {"x": 0.5, "q": 2.0, "z": 4.0, "qd": 3.0})
        assert value == pytest.approx(math.sin(0.5) + 2.0 + 2.0 + 3.0)

    def test_worked_example_lagrangian(self) -> None:
        tree = parse("(x + q + z)/3", VARS)
        assert free_variables(tree) == {"x", "q", "z"}
        assert evaluate(tree, {"x": 0.3, "q": 0.4, "z": 0.2}) == pytest.approx(0.3)


class TestParseErrors:
    """Errors carry a position."""

    def test_unbalanced_parenthesis(self) -> None:
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse("(x + q + z))/3", VARS)
        assert exc_info.value.position == 11

    def test_missing_closing_parenthesis(self) -> None:
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse("sin(x", VARS)
        assert exc_info.value.position == 5

    def test_empty_expression(self) -> None:
        with pytest.raises(ExpressionSyntaxError):
            parse("   ", VARS)

    def test_bad_character(self) -> None:
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse("x $ q", VARS)
        assert exc_info.value.position == 2

    def test_unknown_variable(self) -> None:
        with pytest.raises(UnknownVariableError) as exc_info:
            parse("x + y", VARS)
        assert exc_info.value.name == "y"
        assert exc_info.value.position == 4

    def test_undeclared_variable(self) -> None:
        """Only the declared list is accepted, even for names other problems use."""
        with pytest.raises(UnknownVariableError):
            parse("z", ("x", "q", "qd"))

    def test_unknown_function(self) -> None:
        with pytest.raises(UnknownFunctionError) as exc_info:
            parse("tan(x)", VARS)
        assert exc_info.value.name == "tan"

    def test_implicit_multiplication_rejected(self) -> None:
        with pytest.raises(ExpressionSyntaxError):
            parse("2 x", VARS)


class TestToText:
    """Printing parses back to the same tree."""

    @pytest.mark.parametrize(
        "source",
        [
            "(x + q + z)/3",
            "-x^2",
            "(-x)^2",
            "x^(-1/3)",
            "x - (q - z)",
            "x/(q*z)",
            "2^3^2",
            "-(x + q)*qd",
            "exp(-x)*sin(q^2)",
            "x^-2",
        ],
    )
    def test_reparse_is_structural_identity(self, source: str) -> None:
        tree = parse(source, VARS)
        assert parse(to_text(tree), VARS) == tree

    def test_negative_constant_parenthesized(self) -> None:
        assert to_text(Binary("*", Var("x"), Const(-2.0))) == "x * (-2)"


class TestEvaluation:
    """Scalar and array evaluation agree and report singular points."""

    def test_division_by_zero(self) -> None:
        with pytest.raises(ExpressionDomainError):
            evaluate(parse("1/x", VARS), {"x": 0.0})

    def test_cube_root_of_zero_with_negative_exponent(self) -> None:
        with pytest.raises(ExpressionDomainError):
            evaluate(parse("x^(-1/3)", VARS), {"x": 0.0})

    def test_log_of_negative(self) -> None:
        with pytest.raises(ExpressionDomainError):
            evaluate(parse("ln(x)", VARS), {"x": -1.0})

    def test_array_matches_scalar(self) -> None:
        tree = parse("x^(-1/3) + sin(q)*qd", VARS)
        xs = [0.1, 0.5, 0.9]
        arrays = {"x": xs, "q": [0.2, 0.3, 0.4], "qd": [1.0, -2.0, 3.0]}
        values = evaluate_array(tree, arrays)
        for i, x in enumerate(xs):
            point = {"x": x, "q": arrays["q"][i], "qd": arrays["qd"][i]}
            assert values[i] == pytest.approx(evaluate(tree, point))
