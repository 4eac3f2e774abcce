"""Custom exceptions for compvar."""


class CompVarError(Exception):
    """Base exception for compvar errors."""

    pass


class ValidationError(CompVarError):
    """Raised when validation fails."""

    pass


class ExpressionError(CompVarError):
    """Base exception for expression parsing, evaluation and differentiation."""

    pass


class ExpressionSyntaxError(ExpressionError):
    """Raised when an expression cannot be parsed."""

    def __init__(self, message: str, source: str, position: int) -> None:
        super().__init__(f"{message} at position {position}: {source!r}")
        self.source = source
        self.position = position


class UnknownVariableError(ExpressionError):
    """Raised when an expression names a variable outside the declared list."""

    def __init__(self, name: str, variables: tuple[str, ...], position: int | None = None) -> None:
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"Unknown variable '{name}'{where}. Declared: {', '.join(variables) or 'none'}")
        self.name = name
        self.position = position


class UnknownFunctionError(ExpressionError):
    """Raised when an expression calls a function that is not supported."""

    def __init__(self, name: str, position: int) -> None:
        super().__init__(f"Unknown function '{name}' at position {position}")
        self.name = name
        self.position = position


class ExpressionDomainError(ExpressionError):
    """Raised when evaluation hits a singular point (division by zero, ln/sqrt out of domain)."""

    def __init__(self, message: str, subexpression: str) -> None:
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class NonDifferentiableError(ExpressionError):
    """Raised when differentiation meets a non-differentiable node."""

    pass


class DomainError(CompVarError):
    """Raised when a point lies outside a map's domain."""

    pass


class BreakpointProximityError(CompVarError):
    """Raised when a derivative or probe point is too close to a breakpoint."""

    def __init__(self, message: str, x: float, breakpoint: float) -> None:
        super().__init__(message)
        self.x = x
        self.breakpoint = breakpoint


class ExcludedPointError(BreakpointProximityError):
    """Raised when a residual point must be excluded; `reason` is recorded in reports."""

    def __init__(self, message: str, x: float, breakpoint: float, reason: str) -> None:
        super().__init__(message, x, breakpoint)
        self.reason = reason


class DegenerateBranchError(CompVarError):
    """Raised when |derivative| falls below the configured minimum where it divides."""

    pass


class OdeSingularError(CompVarError):
    """Raised when the reduced invariance ODE has a vanishing denominator."""

    def __init__(self, message: str, location: float) -> None:
        super().__init__(message)
        self.location = location


class RankDeficientError(CompVarError):
    """Raised when collocation produces no usable rows."""

    pass
