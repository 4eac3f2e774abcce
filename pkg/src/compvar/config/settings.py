"""Configuration settings for compvar."""

from pydantic import BaseModel, Field


class Settings(BaseModel):
    """Numerical defaults shared by all analyses.

    Every operation that reads one of these accepts an explicit keyword override,
    so the instance below only supplies defaults.
    """

    # Map and branch checks
    DELTA_MIN: float = Field(default=1e-9, description="Minimum |derivative| accepted on a monotone branch")
    MONOTONE_CHECK_POINTS: int = Field(default=64, description="Interior verification points per branch")
    PREIMAGE_TOL: float = Field(default=1e-12, description="Bisection tolerance |branch(t) - y| for preimages")

    # Piecewise-smooth residuals
    BREAKPOINT_MARGIN: float = Field(default=1e-6, description="Breakpoint exclusion margin, relative to b - a")
    FD_STEP: float = Field(default=1e-6, description="Central finite-difference step, relative to b - a")
    RESIDUAL_TOL: float = Field(default=1e-6, description="Sup-norm tolerance for residual checks")
    RESIDUAL_SAMPLES: int = Field(default=1000, description="Default number of residual sample points")
    BOUNDARY_TOL: float = Field(default=1e-9, description="Tolerance for boundary data against the candidate")

    # Quadrature
    QUAD_TOL: float = Field(default=1e-10, description="Successive-refinement tolerance for Simpson quadrature")
    QUAD_MAX_PANELS: int = Field(default=4096, description="Panel budget per smooth piece for Simpson quadrature")
    QUAD_EPSABS: float = Field(default=1e-13, description="Absolute tolerance for adaptive panel integration")
    QUAD_EPSREL: float = Field(default=1e-12, description="Relative tolerance for adaptive panel integration")
    QUAD_LIMIT: int = Field(default=200, description="Subdivision limit for adaptive panel integration")

    # Frobenius-Perron densities
    DENSITY_GRID: int = Field(default=1000, description="Default number of density grid cells N")
    DENSITY_ITERATIONS: int = Field(default=50, description="Default Frobenius-Perron iteration count")
    DENSITY_BOUNDARY_CELLS: int = Field(default=2, description="Grid cells ignored at each end by residuals")
    DENSITY_TOL: float = Field(default=1e-10, description="Fixed-point residual tolerance in cesaro mode")

    # Noether machinery
    GAUGE_NODES: int = Field(default=201, description="Uniform nodes of the gauge and tau-ODE grids")
    CONSERVATION_SAMPLES: int = Field(default=50, description="Conserved-quantity samples per smooth piece")
    CONSERVATION_TOL: float = Field(default=1e-6, description="Relative per-piece variation tolerance")
    NULL_SPACE_EPS: float = Field(default=1e-8, description="Relative singular-value threshold for null spaces")

    # Logging settings
    LOG_LEVEL: str = Field(default="INFO", description="Logging level")
    LOG_FORMAT: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s", description="Log format string"
    )


# Global settings instance
settings = Settings()
