"""Residual checks of the Euler-Lagrange, DuBois-Reymond and invariance conditions."""

from typing import Literal

from ..core.exceptions import ExpressionDomainError, ValidationError
from ..core.models import ResidualReport
from ..noether.invariance import scan_invariance
from ..utils.logging import get_logger
from ..utils.problem_file import build_generator, build_problem, quadrature_spec
from ..variational.functional import eval_functional
from ..variational.problem import Problem
from ..variational.quadrature import QuadratureSpec
from ..variational.residuals import scan_residuals
from .base import BaseTool

logger = get_logger("check_tool")

type CheckKind = Literal["el", "dbr", "invariance"]

CHECK_KINDS: tuple[str, ...] = ("el", "dbr", "invariance")


def functional_value(problem: Problem, spec: QuadratureSpec) -> float | None:
    """J[q] of the candidate, or None when L is not evaluable on a closed piece."""
    try:
        return eval_functional(problem, spec)
    except ExpressionDomainError as e:
        logger.warning("Functional value not reported: %s", e)
        return None


class CheckTool(BaseTool):
    """Scan one residual of the loaded problem and judge it against the file's tolerance.

    The report also carries the functional value J[q], integrated with the file's
    quadrature settings.
    """

    def execute(self, which: CheckKind = "el", samples: int | None = None) -> ResidualReport:
        pf = self._require_problem()
        problem = build_problem(pf)
        tolerance = pf.tolerances.residual
        logger.debug("Running the %s check in %s mode", which, problem.mode)
        if which == "invariance":
            generator = build_generator(pf)
            if generator is None:
                raise ValidationError("--which invariance needs a 'symmetry' section in the problem file")
            report = scan_invariance(problem, generator, samples, tolerance=tolerance)
        elif which in CHECK_KINDS:
            report = scan_residuals(problem, which, samples, tolerance=tolerance)
        else:
            raise ValidationError(f"Unknown check '{which}'; expected one of {', '.join(CHECK_KINDS)}")
        return report.model_copy(update={"functional_value": functional_value(problem, quadrature_spec(pf))})
