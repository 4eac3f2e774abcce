"""Frobenius-Perron operator on grid densities and invariant densities.

The operator pushes a density f forward under a piecewise-monotone map m:

    P[f](y) = sum over t in m^-1(y) of f(t) / |m'(t)|

Grid densities are interpolated linearly between nodes, so on a fixed grid the
operator is a sparse linear map. `TransferOperator` assembles that matrix once;
`fp_apply`, `fixed_point_residual` and `invariant_density` all go through it.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.integrate import trapezoid

from ..config.settings import settings
from ..core.exceptions import DegenerateBranchError, ExpressionDomainError, ValidationError
from ..expr.nodes import FloatArray
from ..utils.logging import get_logger
from .pwmap import Branch, PiecewiseMap, orbit_ensemble

logger = get_logger("fp")

type DensityMode = Literal["cesaro", "plain"]

# Weight 1/|m'(t)| is trusted only if |m'| stays above this fraction of itself one grid step away
_RESOLVED_SLOPE_RATIO = 0.5


@dataclass(frozen=True, eq=False)
class DensityFn:
    """Nonnegative values at the N+1 uniform nodes of [a, b]."""

    grid: FloatArray
    values: FloatArray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 2:
            raise ValidationError("A density grid needs at least two nodes")
        if values.shape != grid.shape:
            raise ValidationError(f"Density has {values.size} values for {grid.size} nodes")
        if np.any(values < 0.0):
            raise ValidationError("Density values must be nonnegative")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform_grid(cls, a: float, b: float, cells: int) -> FloatArray:
        if cells < 1:
            raise ValidationError(f"A density grid needs at least one cell, got {cells}")
        return np.linspace(a, b, cells + 1)

    @classmethod
    def constant(cls, a: float, b: float, cells: int, value: float = 1.0) -> "DensityFn":
        grid = cls.uniform_grid(a, b, cells)
        return cls(grid, np.full_like(grid, value))

    @classmethod
    def from_values(cls, a: float, b: float, values: npt.ArrayLike) -> "DensityFn":
        samples = np.asarray(values, dtype=np.float64)
        return cls(cls.uniform_grid(a, b, samples.size - 1), samples)

    @property
    def a(self) -> float:
        return float(self.grid[0])

    @property
    def b(self) -> float:
        return float(self.grid[-1])

    @property
    def cells(self) -> int:
        return self.grid.size - 1

    def mass(self) -> float:
        return float(trapezoid(self.values, self.grid))

    def normalize(self) -> "DensityFn":
        total = self.mass()
        if total <= 0.0:
            raise ValidationError("Cannot normalize a density with zero mass")
        return DensityFn(self.grid, self.values / total)

    def interpolate(self, xs: npt.ArrayLike) -> FloatArray:
        return np.interp(np.asarray(xs, dtype=np.float64), self.grid, self.values)


class TransferOperator:
    """The Frobenius-Perron operator of `m` on a fixed uniform grid, as a sparse matrix.

    Preimages are taken on branch closures, so nodes that are images of breakpoints
    receive one-sided contributions from every adjacent branch. A node is singular
    when the slope at its preimage is below delta_min or is not resolved by the
    grid: |m'| falls below half its value within one grid step, as it does next to
    a critical point. Inside the boundary margin a singular row is copied from the
    nearest regular node, elsewhere it raises DegenerateBranchError.
    """

    def __init__(
        self,
        m: PiecewiseMap,
        grid: FloatArray,
        *,
        delta_min: float | None = None,
        boundary_cells: int | None = None,
    ) -> None:
        self.map = m
        self.grid = np.asarray(grid, dtype=np.float64)
        self.delta_min = delta_min if delta_min is not None else m.delta_min
        self.boundary_cells = boundary_cells if boundary_cells is not None else settings.DENSITY_BOUNDARY_CELLS
        if not np.isclose(self.grid[0], m.a) or not np.isclose(self.grid[-1], m.b):
            raise ValidationError(f"Density grid [{self.grid[0]}, {self.grid[-1]}] differs from map domain")
        steps = np.diff(self.grid)
        if not np.allclose(steps, steps[0]):
            raise ValidationError("Transfer operator needs a uniform grid")
        self.step = float(steps[0])
        self.matrix, self.singular_nodes = self._assemble()

    def _branch_weights(
        self, index: int
    ) -> tuple[npt.NDArray[np.intp], FloatArray, FloatArray, npt.NDArray[np.bool_]]:
        """Rows, preimages and weights 1/|m'(t)| of one branch, plus a singular-row mask."""
        branch = self.map.branches[index]
        ts, found = branch.solve(self.grid)
        rows = np.flatnonzero(found)
        ts = ts[rows]
        slopes = _abs_slopes(branch, ts)
        nearby = np.minimum(
            _abs_slopes(branch, np.clip(ts - self.step, branch.lower, branch.upper)),
            _abs_slopes(branch, np.clip(ts + self.step, branch.lower, branch.upper)),
        )
        singular = (slopes < self.delta_min) | (nearby < _RESOLVED_SLOPE_RATIO * slopes)
        weights = np.zeros_like(slopes)
        weights[~singular] = 1.0 / slopes[~singular]
        return rows, ts, weights, singular

    def _assemble(self) -> tuple[sparse.csr_matrix, tuple[int, ...]]:
        size = self.grid.size
        row_parts: list[npt.NDArray[np.intp]] = []
        col_parts: list[npt.NDArray[np.intp]] = []
        data_parts: list[FloatArray] = []
        singular_rows: set[int] = set()

        for index in range(len(self.map.branches)):
            rows, ts, weights, singular = self._branch_weights(index)
            singular_rows.update(int(r) for r in rows[singular])
            regular = ~singular
            rows, ts, weights = rows[regular], ts[regular], weights[regular]
            # Linear interpolation stencil of f at t
            position = (ts - self.grid[0]) / self.step
            left = np.clip(np.floor(position), 0, size - 2).astype(np.intp)
            fraction = position - left
            row_parts += [rows, rows]
            col_parts += [left, left + 1]
            data_parts += [weights * (1.0 - fraction), weights * fraction]

        matrix = sparse.coo_matrix(
            (np.concatenate(data_parts), (np.concatenate(row_parts), np.concatenate(col_parts))),
            shape=(size, size),
        ).tocsr()

        singular = tuple(sorted(singular_rows))
        if singular:
            matrix = self._fill_singular_rows(matrix, singular)
        return matrix, singular

    def _fill_singular_rows(self, matrix: sparse.csr_matrix, singular: tuple[int, ...]) -> sparse.csr_matrix:
        size = self.grid.size
        margin = self.boundary_cells
        interior = [r for r in singular if margin <= r < size - margin]
        if interior:
            node = float(self.grid[interior[0]])
            raise DegenerateBranchError(
                f"Preimage of grid node y={node:.6g} has |derivative| below {self.delta_min} "
                "or unresolved by the grid; the density is singular away from the boundary"
            )
        regular = np.setdiff1d(np.arange(size), np.asarray(singular))
        source = np.arange(size)
        for row in singular:
            source[row] = regular[np.argmin(np.abs(regular - row))]
        logger.warning(
            "Filled %d singular density node(s) at %s from nearest regular nodes",
            len(singular),
            ", ".join(f"{self.grid[r]:.6g}" for r in singular),
        )
        return sparse.csr_matrix(matrix[source])

    def apply(self, values: FloatArray) -> FloatArray:
        return np.asarray(self.matrix @ values, dtype=np.float64)

    def interior(self) -> slice:
        """Grid nodes outside the boundary margin."""
        return slice(self.boundary_cells, self.grid.size - self.boundary_cells)


def _abs_slopes(branch: Branch, ts: FloatArray) -> FloatArray:
    try:
        return np.abs(np.broadcast_to(branch.slopes(ts), ts.shape)).astype(np.float64)
    except ExpressionDomainError:
        return np.array([_safe_abs_slope(branch.slope, t) for t in ts], dtype=np.float64)


def _safe_abs_slope(slope: Callable[[float], float], t: float) -> float:
    try:
        return abs(slope(t))
    except ExpressionDomainError:
        return 0.0


@dataclass(frozen=True, eq=False)
class InvariantDensity:
    """Result of `invariant_density`: the density and its fixed-point residual."""

    density: DensityFn
    residual: float
    mode: DensityMode
    iterations: int


def fp_apply(m: PiecewiseMap, f: DensityFn, operator: TransferOperator | None = None) -> DensityFn:
    """One application of the Frobenius-Perron operator."""
    transfer = operator if operator is not None else TransferOperator(m, f.grid)
    return DensityFn(f.grid, np.maximum(transfer.apply(f.values), 0.0))


def fixed_point_residual(
    m: PiecewiseMap,
    f: DensityFn,
    *,
    boundary_cells: int | None = None,
    operator: TransferOperator | None = None,
) -> float:
    """Sup-norm of P[f] - f over grid nodes outside the boundary margin."""
    transfer = operator if operator is not None else TransferOperator(m, f.grid, boundary_cells=boundary_cells)
    difference = transfer.apply(f.values) - f.values
    window = difference[transfer.interior()]
    return float(np.max(np.abs(window))) if window.size else 0.0


def invariant_density(
    m: PiecewiseMap,
    n: int | None = None,
    mode: DensityMode = "cesaro",
    *,
    cells: int | None = None,
    boundary_cells: int | None = None,
) -> InvariantDensity:
    """Sum of P^i[1] for i < n; in cesaro mode averaged over n and normalized.

    Cesaro mode rescales every iterate to the mass of 1, so the discrete
    operator's mass defect at singular boundary nodes does not accumulate. Plain
    mode returns the unnormalized sum exactly as written, which grows linearly in
    n whenever 1 is invariant.
    """
    iterations = n if n is not None else settings.DENSITY_ITERATIONS
    if iterations < 1:
        raise ValidationError(f"Iteration count must be at least 1, got {iterations}")
    if mode not in ("cesaro", "plain"):
        raise ValidationError(f"Unknown density mode '{mode}'")

    grid = DensityFn.uniform_grid(m.a, m.b, cells if cells is not None else settings.DENSITY_GRID)
    transfer = TransferOperator(m, grid, boundary_cells=boundary_cells)

    current = np.ones_like(grid)
    initial_mass = float(trapezoid(current, grid))
    total = np.zeros_like(grid)
    for step in range(iterations):
        total += current
        current = transfer.apply(current)
        if mode == "cesaro":
            # Discretisation drift near singular nodes must not compound over iterations
            mass = float(trapezoid(current, grid))
            if mass > 0.0:
                current *= initial_mass / mass
        if step % 50 == 49:
            logger.debug("Frobenius-Perron iteration %d of %d", step + 1, iterations)

    if mode == "cesaro":
        density = DensityFn(grid, np.maximum(total / iterations, 0.0)).normalize()
    else:
        density = DensityFn(grid, np.maximum(total, 0.0))
    residual = fixed_point_residual(m, density, operator=transfer)
    logger.info("Invariant density (%s, n=%d, N=%d): residual %.3g", mode, iterations, grid.size - 1, residual)
    return InvariantDensity(density, residual, mode, iterations)


def orbit_histogram(
    m: PiecewiseMap,
    bins: int = 200,
    *,
    points: int = 1_000_000,
    orbits: int = 1000,
    transient: int = 100,
    seed: int = 0,
) -> tuple[FloatArray, FloatArray]:
    """Normalized histogram of ensemble orbit points; returns (bin edges, density).

    Starting points are drawn from a seeded generator. Maps whose floating-point
    orbits collapse onto a fixed point (the tent map does after ~50 steps) give
    meaningless histograms; this is meant for maps such as the logistic map.
    """
    rng = np.random.default_rng(seed)
    starts = rng.uniform(m.a, m.b, orbits)
    steps = max(1, points // orbits)
    history = orbit_ensemble(m, starts, steps, transient=transient)
    density, edges = np.histogram(history.ravel(), bins=bins, range=(m.a, m.b), density=True)
    return edges, density.astype(np.float64)
