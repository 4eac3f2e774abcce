"""Conservation-law reports: gauge term, conserved quantity and verdict."""

from pathlib import Path

from ..core.exceptions import ValidationError
from ..core.models import ConservationReport
from ..noether.gauge import conservation_check
from ..noether.symmetries import solve_tau_ode
from ..utils.formatting import OutputFormat
from ..utils.logging import get_logger
from ..utils.problem_file import build_generator, build_problem
from .base import BaseTool

logger = get_logger("noether_tool")


class NoetherTool(BaseTool):
    """Check the conservation law of a given or solved symmetry generator.

    The generator comes from --tau/--xi, from solving the reduced tau ODE, or
    from the file's symmetry section, in that order.
    """

    def execute(
        self,
        tau: str | None = None,
        xi: str | None = None,
        solve_ode: bool = False,
        x_ref: float | None = None,
    ) -> ConservationReport:
        pf = self._require_problem()
        problem = build_problem(pf)
        if solve_ode:
            if tau is not None or xi is not None:
                raise ValidationError("--solve-ode cannot be combined with --tau or --xi")
            generator = solve_tau_ode(problem, x_ref)
        else:
            found = build_generator(pf, tau, xi)
            if found is None:
                raise ValidationError("Give --tau, --solve-ode or a 'symmetry' section in the problem file")
            generator = found
        logger.debug("Checking conservation for tau=%s, xi=%s", generator.tau_text, generator.xi_text)
        return conservation_check(problem, generator, tolerance=pf.tolerances.conservation)

    def write_report(self, report: ConservationReport, path: str | Path, output_format: OutputFormat) -> None:
        target = Path(path)
        target.write_text(self._format_result(report, output_format), encoding="utf-8")
        logger.info("Conservation report written to %s", target)
