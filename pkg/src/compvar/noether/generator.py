"""Infinitesimal symmetry generators (tau, xi)."""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace

from ..config.constants import GENERATOR_VARIABLES
from ..core.exceptions import ValidationError
from ..expr.calculus import ZERO, add, differentiate, mul
from ..expr.nodes import Const, Expr, FloatArray, evaluate, free_variables, to_text
from ..expr.parser import parse
from ..variational.quadrature import CumulativeIntegral


@dataclass(frozen=True, eq=False)
class TauTable:
    """tau(x) = scale * exp(-integral of rate from x_ref to x), tabulated on nodes.

    Produced by integrating the reduced invariance ODE; `at` is exact between
    nodes because it integrates from the nearest node.
    """

    x_ref: float
    nodes: FloatArray
    values: FloatArray
    exponent: CumulativeIntegral
    rate: Callable[[float], float]
    scale: float = 1.0

    def at(self, x: float) -> float:
        return self.scale * math.exp(-self.exponent.at(x))

    def derivative(self, x: float) -> float:
        return -self.rate(x) * self.at(x)

    def scaled(self, k: float) -> "TauTable":
        return replace(self, values=k * self.values, scale=k * self.scale)


@dataclass(frozen=True)
class SymmetryGenerator:
    """tau(x, q) and xi(x, q), or a sampled tau with xi = 0.

    Total derivatives along a candidate use the chain rule,
    tau' = d tau/dx + d tau/dq * q', so only q' is needed.
    """

    tau: Expr = ZERO
    xi: Expr = ZERO
    table: TauTable | None = field(default=None, compare=False)
    _tau_x: Expr = field(init=False, repr=False, compare=False)
    _tau_q: Expr = field(init=False, repr=False, compare=False)
    _xi_x: Expr = field(init=False, repr=False, compare=False)
    _xi_q: Expr = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name, expr in (("tau", self.tau), ("xi", self.xi)):
            unknown = free_variables(expr) - set(GENERATOR_VARIABLES)
            if unknown:
                raise ValidationError(f"{name} may only depend on x and q, found: {', '.join(sorted(unknown))}")
        if self.table is not None and not self.xi_is_zero:
            raise ValidationError("A sampled tau is only supported with xi = 0")
        object.__setattr__(self, "_tau_x", differentiate(self.tau, "x"))
        object.__setattr__(self, "_tau_q", differentiate(self.tau, "q"))
        object.__setattr__(self, "_xi_x", differentiate(self.xi, "x"))
        object.__setattr__(self, "_xi_q", differentiate(self.xi, "q"))

    @classmethod
    def parse(cls, tau: str = "0", xi: str = "0") -> "SymmetryGenerator":
        return cls(parse(tau, GENERATOR_VARIABLES), parse(xi, GENERATOR_VARIABLES))

    @classmethod
    def sampled(cls, table: TauTable) -> "SymmetryGenerator":
        return cls(table=table)

    @classmethod
    def combine(
        cls, coefficients: Sequence[float], basis_tau: Sequence[Expr], basis_xi: Sequence[Expr]
    ) -> "SymmetryGenerator":
        """sum c_k tau_k and sum c_j xi_j for coefficients ordered tau basis first."""
        if len(coefficients) != len(basis_tau) + len(basis_xi):
            raise ValidationError("Coefficient count does not match the basis size")
        tau: Expr = ZERO
        xi: Expr = ZERO
        for c, expr in zip(coefficients[: len(basis_tau)], basis_tau, strict=True):
            tau = add(tau, mul(Const(float(c)), expr))
        for c, expr in zip(coefficients[len(basis_tau) :], basis_xi, strict=True):
            xi = add(xi, mul(Const(float(c)), expr))
        return cls(tau, xi)

    @property
    def is_sampled(self) -> bool:
        return self.table is not None

    @property
    def is_x_only(self) -> bool:
        return self.table is not None or "q" not in free_variables(self.tau)

    @property
    def xi_is_zero(self) -> bool:
        return isinstance(self.xi, Const) and self.xi.value == 0.0

    @property
    def tau_is_zero(self) -> bool:
        return self.table is None and isinstance(self.tau, Const) and self.tau.value == 0.0

    @property
    def tau_text(self) -> str:
        if self.table is not None:
            return f"sampled(x_ref={self.table.x_ref:.15g}, scale={self.table.scale:.15g})"
        return to_text(self.tau)

    @property
    def xi_text(self) -> str:
        return to_text(self.xi)

    def tau_at(self, x: float, q: float) -> float:
        if self.table is not None:
            return self.table.at(x)
        return evaluate(self.tau, {"x": x, "q": q})

    def xi_at(self, x: float, q: float) -> float:
        return evaluate(self.xi, {"x": x, "q": q})

    def tau_rate(self, x: float, q: float, qd: float) -> float:
        """Total derivative of tau along a curve with slope qd."""
        if self.table is not None:
            return self.table.derivative(x)
        point = {"x": x, "q": q}
        return evaluate(self._tau_x, point) + evaluate(self._tau_q, point) * qd

    def xi_rate(self, x: float, q: float, qd: float) -> float:
        point = {"x": x, "q": q}
        return evaluate(self._xi_x, point) + evaluate(self._xi_q, point) * qd

    def scaled(self, k: float) -> "SymmetryGenerator":
        """(k tau, k xi); a sampled tau is scaled by the same factor."""
        factor = Const(float(k))
        table = self.table.scaled(k) if self.table is not None else None
        return SymmetryGenerator(mul(factor, self.tau), mul(factor, self.xi), table)
