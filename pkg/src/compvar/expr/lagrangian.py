"""Lagrangians with exact symbolic partial derivatives."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from ..config.constants import COMPOSITIONAL_VARIABLES
from ..core.exceptions import ValidationError
from .calculus import differentiate
from .nodes import Expr, evaluate, free_variables, to_text
from .parser import parse


def classical_variables(dimension: int) -> tuple[str, ...]:
    """Variable list of a classical Lagrangian L(x, q, qd) with `dimension` components."""
    if dimension < 1:
        raise ValidationError(f"Classical dimension must be at least 1, got {dimension}")
    if dimension == 1:
        return ("x", "q", "qd")
    positions = tuple(f"q{i}" for i in range(1, dimension + 1))
    velocities = tuple(f"qd{i}" for i in range(1, dimension + 1))
    return ("x", *positions, *velocities)


@dataclass(frozen=True)
class Lagrangian:
    """A Lagrangian body together with its partial derivatives in every declared variable.

    The partials are computed once at construction, which also enforces that the
    body is symbolically differentiable (no abs()).
    """

    body: Expr
    variables: tuple[str, ...] = COMPOSITIONAL_VARIABLES
    partials: Mapping[str, Expr] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        unknown = free_variables(self.body) - set(self.variables)
        if unknown:
            raise ValidationError(f"Lagrangian uses undeclared variables: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "partials", {name: differentiate(self.body, name) for name in self.variables})

    @classmethod
    def parse(cls, source: str, variables: Sequence[str] = COMPOSITIONAL_VARIABLES) -> "Lagrangian":
        return cls(parse(source, variables), tuple(variables))

    @classmethod
    def classical(cls, source: str, dimension: int = 1) -> "Lagrangian":
        return cls.parse(source, classical_variables(dimension))

    @property
    def is_compositional(self) -> bool:
        return self.variables == COMPOSITIONAL_VARIABLES

    @property
    def depends_on_z(self) -> bool:
        return "z" in free_variables(self.body)

    def partial(self, name: str) -> Expr:
        try:
            return self.partials[name]
        except KeyError:
            raise ValidationError(f"Lagrangian has no variable '{name}'") from None

    # Positional partials of the compositional form L(x, q, qd, z)
    @property
    def d1(self) -> Expr:
        return self.partial("x")

    @property
    def d2(self) -> Expr:
        return self.partial("q")

    @property
    def d3(self) -> Expr:
        return self.partial("qd")

    @property
    def d4(self) -> Expr:
        return self.partial("z")

    def value(self, point: Mapping[str, float]) -> float:
        return evaluate(self.body, point)

    def partial_value(self, name: str, point: Mapping[str, float]) -> float:
        return evaluate(self.partial(name), point)

    def __str__(self) -> str:
        return to_text(self.body)
