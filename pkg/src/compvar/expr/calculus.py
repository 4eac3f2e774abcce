"""Symbolic differentiation and substitution with constant folding."""

from collections.abc import Mapping

from ..core.exceptions import ExpressionDomainError, NonDifferentiableError
from .nodes import Binary, Const, Expr, Unary, Var, evaluate, free_variables, to_text

ZERO = Const(0.0)
ONE = Const(1.0)


def _is_const(expr: Expr, value: float | None = None) -> bool:
    return isinstance(expr, Const) and (value is None or expr.value == value)


def fold_constant(expr: Expr) -> Expr:
    """Collapse a variable-free subtree into a single constant when it evaluates cleanly."""
    if isinstance(expr, Const) or free_variables(expr):
        return expr
    try:
        return Const(evaluate(expr, {}))
    except ExpressionDomainError:
        return expr


def neg(operand: Expr) -> Expr:
    if isinstance(operand, Const):
        return Const(-operand.value)
    return Unary("neg", operand)


def func(name: str, operand: Expr) -> Expr:
    return fold_constant(Unary(name, operand))


def add(left: Expr, right: Expr) -> Expr:
    if _is_const(left, 0.0):
        return right
    if _is_const(right, 0.0):
        return left
    return fold_constant(Binary("+", left, right))


def sub(left: Expr, right: Expr) -> Expr:
    if _is_const(right, 0.0):
        return left
    if _is_const(left, 0.0):
        return neg(right)
    return fold_constant(Binary("-", left, right))


def mul(left: Expr, right: Expr) -> Expr:
    if _is_const(left, 0.0) or _is_const(right, 0.0):
        return ZERO
    if _is_const(left, 1.0):
        return right
    if _is_const(right, 1.0):
        return left
    return fold_constant(Binary("*", left, right))


def div(left: Expr, right: Expr) -> Expr:
    if _is_const(right, 1.0):
        return left
    if _is_const(left, 0.0) and not _is_const(right, 0.0):
        return ZERO
    return fold_constant(Binary("/", left, right))


def power(base: Expr, exponent: Expr) -> Expr:
    if _is_const(exponent, 1.0):
        return base
    if _is_const(exponent, 0.0):
        return ONE
    return fold_constant(Binary("^", base, exponent))


def differentiate(expr: Expr, variable: str) -> Expr:
    """Exact symbolic partial derivative of `expr` with respect to `variable`.

    Raises NonDifferentiableError for abs(), which is accepted by the parser and
    the evaluators but has no derivative tree.
    """
    match expr:
        case Const():
            return ZERO
        case Var(name=name):
            return ONE if name == variable else ZERO
        case Unary(op="abs"):
            raise NonDifferentiableError(f"abs() is not differentiable: '{to_text(expr)}'")
        case Unary(op=op, operand=operand):
            inner = differentiate(operand, variable)
            match op:
                case "neg":
                    return neg(inner)
                case "sin":
                    return mul(func("cos", operand), inner)
                case "cos":
                    return mul(neg(func("sin", operand)), inner)
                case "exp":
                    return mul(func("exp", operand), inner)
                case "ln":
                    return div(inner, operand)
                case "sqrt":
                    return div(inner, mul(Const(2.0), func("sqrt", operand)))
            raise NonDifferentiableError(f"Unknown function '{op}'")
        case Binary(op="+", left=left, right=right):
            return add(differentiate(left, variable), differentiate(right, variable))
        case Binary(op="-", left=left, right=right):
            return sub(differentiate(left, variable), differentiate(right, variable))
        case Binary(op="*", left=left, right=right):
            return add(
                mul(differentiate(left, variable), right),
                mul(left, differentiate(right, variable)),
            )
        case Binary(op="/", left=left, right=right):
            numerator = sub(
                mul(differentiate(left, variable), right),
                mul(left, differentiate(right, variable)),
            )
            return div(numerator, power(right, Const(2.0)))
        case Binary(op="^", left=base, right=exponent):
            base_derivative = differentiate(base, variable)
            if not free_variables(exponent):
                # d(u^c) = c * u^(c-1) * u'
                constant = fold_constant(exponent)
                return mul(mul(constant, power(base, sub(constant, ONE))), base_derivative)
            # d(u^w) = u^w * (w' ln u + w u'/u)
            exponent_derivative = differentiate(exponent, variable)
            return mul(
                expr,
                add(
                    mul(exponent_derivative, func("ln", base)),
                    div(mul(exponent, base_derivative), base),
                ),
            )
    raise NonDifferentiableError(f"Cannot differentiate '{to_text(expr)}'")


def substitute(expr: Expr, replacements: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions; the tree is otherwise left as is."""
    match expr:
        case Const():
            return expr
        case Var(name=name):
            return replacements.get(name, expr)
        case Unary(op=op, operand=operand):
            return Unary(op, substitute(operand, replacements))
        case Binary(op=op, left=left, right=right):
            return Binary(op, substitute(left, replacements), substitute(right, replacements))
    raise TypeError(f"Not an expression node: {expr!r}")
