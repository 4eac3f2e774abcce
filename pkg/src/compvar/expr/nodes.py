"""Expression tree nodes, printing and evaluation.

Trees are built from four frozen node types and are never mutated, so a single
tree can be shared by any number of concurrent evaluations.

Two evaluators share one operator table: `evaluate` works on Python floats with
`math`, `evaluate_array` works on numpy arrays and is used wherever a whole grid
is evaluated at once. Both raise `ExpressionDomainError` at singular points
instead of returning NaN or infinity.
"""

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..core.exceptions import ExpressionDomainError, UnknownVariableError

FloatArray = npt.NDArray[np.float64]

# Function-call names accepted by the parser; "neg" is the prefix minus
FUNCTIONS = frozenset({"sin", "cos", "exp", "ln", "sqrt", "abs"})
BINARY_OPERATORS = frozenset({"+", "-", "*", "/", "^"})

# Printing precedences
PRECEDENCE_ADD = 1
PRECEDENCE_MUL = 2
PRECEDENCE_NEG = 3
PRECEDENCE_POW = 4
PRECEDENCE_ATOM = 5

_BINARY_PRECEDENCE = {"+": PRECEDENCE_ADD, "-": PRECEDENCE_ADD, "*": PRECEDENCE_MUL, "/": PRECEDENCE_MUL}


@dataclass(frozen=True)
class Const:
    """Real constant."""

    value: float


@dataclass(frozen=True)
class Var:
    """Reference to a declared variable."""

    name: str


@dataclass(frozen=True)
class Unary:
    """Prefix minus ("neg") or a function call (sin, cos, exp, ln, sqrt, abs)."""

    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    """Binary arithmetic: +, -, *, / and ^ (power)."""

    op: str
    left: "Expr"
    right: "Expr"


type Expr = Const | Var | Unary | Binary


def precedence(expr: Expr) -> int:
    """Binding strength of the node's outermost operator."""
    match expr:
        case Binary(op="^"):
            return PRECEDENCE_POW
        case Binary(op=op):
            return _BINARY_PRECEDENCE[op]
        case Unary(op="neg"):
            return PRECEDENCE_NEG
        case _:
            return PRECEDENCE_ATOM


def _format_constant(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        text = str(int(value))
    else:
        text = repr(value)
    return f"({text})" if value < 0 else text


def to_text(expr: Expr) -> str:
    """Print an expression with the minimal parentheses the grammar needs.

    `parse(to_text(e))` is structurally equal to `e` for every tree the parser
    produces.
    """
    match expr:
        case Const(value=value):
            return _format_constant(value)
        case Var(name=name):
            return name
        case Unary(op="neg", operand=operand):
            inner = to_text(operand)
            return f"-({inner})" if precedence(operand) < PRECEDENCE_NEG else f"-{inner}"
        case Unary(op=op, operand=operand):
            return f"{op}({to_text(operand)})"
        case Binary(op="^", left=left, right=right):
            base = to_text(left)
            if precedence(left) <= PRECEDENCE_POW:
                base = f"({base})"
            exponent = to_text(right)
            if precedence(right) < PRECEDENCE_NEG:
                exponent = f"({exponent})"
            return f"{base}^{exponent}"
        case Binary(op=op, left=left, right=right):
            level = _BINARY_PRECEDENCE[op]
            lhs = to_text(left)
            if precedence(left) < level:
                lhs = f"({lhs})"
            rhs = to_text(right)
            if precedence(right) <= level:
                rhs = f"({rhs})"
            return f"{lhs} {op} {rhs}"
    raise TypeError(f"Not an expression node: {expr!r}")


def free_variables(expr: Expr) -> frozenset[str]:
    """Names of the variables an expression actually uses."""
    match expr:
        case Const():
            return frozenset()
        case Var(name=name):
            return frozenset({name})
        case Unary(operand=operand):
            return free_variables(operand)
        case Binary(left=left, right=right):
            return free_variables(left) | free_variables(right)
    raise TypeError(f"Not an expression node: {expr!r}")


def _domain_error(message: str, expr: Expr) -> ExpressionDomainError:
    return ExpressionDomainError(message, to_text(expr))


def _scalar_unary(expr: Unary, value: float) -> float:
    match expr.op:
        case "neg":
            return -value
        case "sin":
            return math.sin(value)
        case "cos":
            return math.cos(value)
        case "abs":
            return abs(value)
        case "exp":
            try:
                return math.exp(value)
            except OverflowError:
                raise _domain_error("overflow", expr) from None
        case "ln":
            if value <= 0.0:
                raise _domain_error(f"logarithm of nonpositive value {value!r}", expr)
            return math.log(value)
        case "sqrt":
            if value < 0.0:
                raise _domain_error(f"square root of negative value {value!r}", expr)
            return math.sqrt(value)
    raise _domain_error(f"unknown function '{expr.op}'", expr)


def _scalar_binary(expr: Binary, left: float, right: float) -> float:
    match expr.op:
        case "+":
            result = left + right
        case "-":
            result = left - right
        case "*":
            result = left * right
        case "/":
            if right == 0.0:
                raise _domain_error("division by zero", expr)
            result = left / right
        case "^":
            if left == 0.0 and right < 0.0:
                raise _domain_error("zero raised to a negative power", expr)
            if left < 0.0 and not float(right).is_integer():
                raise _domain_error(f"negative base {left!r} with non-integer exponent", expr)
            try:
                result = math.pow(left, right)
            except OverflowError:
                raise _domain_error("overflow", expr) from None
        case _:
            raise _domain_error(f"unknown operator '{expr.op}'", expr)
    if not math.isfinite(result):
        raise _domain_error("non-finite result", expr)
    return result


def evaluate(expr: Expr, point: Mapping[str, float]) -> float:
    """Evaluate an expression at a point given as a variable assignment."""
    match expr:
        case Const(value=value):
            return value
        case Var(name=name):
            try:
                return float(point[name])
            except KeyError:
                raise UnknownVariableError(name, tuple(point)) from None
        case Unary():
            return _scalar_unary(expr, evaluate(expr.operand, point))
        case Binary():
            return _scalar_binary(expr, evaluate(expr.left, point), evaluate(expr.right, point))
    raise TypeError(f"Not an expression node: {expr!r}")


def _array_unary(expr: Unary, value: FloatArray) -> FloatArray:
    match expr.op:
        case "neg":
            return -value
        case "sin":
            return np.sin(value)
        case "cos":
            return np.cos(value)
        case "abs":
            return np.abs(value)
        case "exp":
            result = np.exp(value)
            if not np.all(np.isfinite(result)):
                raise _domain_error("overflow", expr)
            return result
        case "ln":
            if np.any(value <= 0.0):
                raise _domain_error("logarithm of nonpositive value", expr)
            return np.log(value)
        case "sqrt":
            if np.any(value < 0.0):
                raise _domain_error("square root of negative value", expr)
            return np.sqrt(value)
    raise _domain_error(f"unknown function '{expr.op}'", expr)


def _array_binary(expr: Binary, left: FloatArray, right: FloatArray) -> FloatArray:
    with np.errstate(all="ignore"):
        match expr.op:
            case "+":
                result = left + right
            case "-":
                result = left - right
            case "*":
                result = left * right
            case "/":
                if np.any(right == 0.0):
                    raise _domain_error("division by zero", expr)
                result = left / right
            case "^":
                if np.any((left == 0.0) & (right < 0.0)):
                    raise _domain_error("zero raised to a negative power", expr)
                if np.any((left < 0.0) & (np.floor(right) != right)):
                    raise _domain_error("negative base with non-integer exponent", expr)
                result = np.power(left, right)
            case _:
                raise _domain_error(f"unknown operator '{expr.op}'", expr)
    if not np.all(np.isfinite(result)):
        raise _domain_error("non-finite result", expr)
    return np.asarray(result, dtype=np.float64)


def _evaluate_array(expr: Expr, arrays: Mapping[str, FloatArray]) -> FloatArray:
    match expr:
        case Const(value=value):
            return np.asarray(value, dtype=np.float64)
        case Var(name=name):
            try:
                return arrays[name]
            except KeyError:
                raise UnknownVariableError(name, tuple(arrays)) from None
        case Unary():
            return _array_unary(expr, _evaluate_array(expr.operand, arrays))
        case Binary():
            return _array_binary(expr, _evaluate_array(expr.left, arrays), _evaluate_array(expr.right, arrays))
    raise TypeError(f"Not an expression node: {expr!r}")


def evaluate_array(expr: Expr, arrays: Mapping[str, npt.ArrayLike]) -> FloatArray:
    """Evaluate an expression elementwise over broadcastable numpy arrays."""
    converted = {name: np.asarray(value, dtype=np.float64) for name, value in arrays.items()}
    shape = np.broadcast_shapes(*(value.shape for value in converted.values())) if converted else ()
    result = _evaluate_array(expr, converted)
    return np.array(np.broadcast_to(result, shape), dtype=np.float64)
