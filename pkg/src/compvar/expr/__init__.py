"""Expression trees: parsing, evaluation and symbolic differentiation."""

from .calculus import differentiate, substitute
from .lagrangian import Lagrangian, classical_variables
from .nodes import Binary, Const, Expr, Unary, Var, evaluate, evaluate_array, free_variables, to_text
from .parser import parse

__all__ = [
    "Binary",
    "Const",
    "Expr",
    "Lagrangian",
    "Unary",
    "Var",
    "classical_variables",
    "differentiate",
    "evaluate",
    "evaluate_array",
    "free_variables",
    "parse",
    "substitute",
    "to_text",
]
