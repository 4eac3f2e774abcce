"""Invariant densities of the problem file's map."""

from pathlib import Path

from ..core.models import DensityReport
from ..dynamics.fp import DensityMode, invariant_density
from ..expr.nodes import FloatArray
from ..utils.formatting import format_real
from ..utils.logging import get_logger
from ..utils.problem_file import build_map
from ..variational.functional import chaos_functional
from .base import BaseTool

logger = get_logger("density_tool")


class DensityTool(BaseTool):
    """Iterate the Frobenius-Perron operator from the uniform density.

    Command-line values override the file's density section. The fixed-point
    residual is only judged in cesaro mode; plain sums are not normalized.
    """

    def execute(
        self,
        n: int | None = None,
        grid: int | None = None,
        mode: DensityMode | None = None,
        out: str | Path | None = None,
    ) -> DensityReport:
        pf = self._require_problem()
        m = build_map(pf, self_composable=True)
        section = pf.density
        chosen: DensityMode = mode if mode is not None else section.mode
        result = invariant_density(
            m,
            n if n is not None else section.iterations,
            chosen,
            cells=grid if grid is not None else section.grid,
        )
        density = result.density
        tolerance = pf.tolerances.density
        if out is not None:
            write_density(density.grid, density.values, out)

        return DensityReport(
            mode=chosen,
            iterations=result.iterations,
            nodes=density.grid.tolist(),
            values=density.values.tolist(),
            fixed_point_residual=result.residual,
            mass=density.mass(),
            chaos_value=chaos_functional(m, density.normalize()),
            tolerance=tolerance,
            passed=chosen == "plain" or result.residual <= tolerance,
        )


def write_density(nodes: FloatArray, values: FloatArray, path: str | Path) -> None:
    """Two whitespace-separated columns: node and density value."""
    target = Path(path)
    lines = [f"{format_real(float(x))} {format_real(float(v))}" for x, v in zip(nodes, values, strict=True)]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("Density table with %d rows written to %s", len(lines), target)
