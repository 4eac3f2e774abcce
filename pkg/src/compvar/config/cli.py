"""Command line interface configuration for compvar."""

import argparse
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

type Command = Literal["check", "noether", "density", "verify-paper-example"]


class CheckOptions(BaseModel):
    """Options of `compvar check`."""

    which: Literal["el", "dbr", "invariance"] = Field(default="el", description="Residual to scan")
    samples: int | None = Field(default=None, ge=10, description="Number of uniform sample points")


class NoetherOptions(BaseModel):
    """Options of `compvar noether`."""

    tau: str | None = Field(default=None, description="tau(x, q) expression")
    xi: str | None = Field(default=None, description="xi(x, q) expression")
    solve_ode: bool = Field(default=False, description="Solve the reduced tau ODE instead")
    x_ref: float | None = Field(default=None, description="Normalization point tau(x_ref) = 1")
    report: Path | None = Field(default=None, description="Also write the report to this path")


class DensityOptions(BaseModel):
    """Options of `compvar density`."""

    n: int | None = Field(default=None, ge=1, description="Frobenius-Perron iterations")
    grid: int | None = Field(default=None, ge=1, description="Number of grid cells")
    mode: Literal["cesaro", "plain"] | None = Field(default=None, description="Averaging mode")
    out: Path | None = Field(default=None, description="Two-column density output file")


class CLIConfig(BaseModel):
    """Complete CLI configuration."""

    command: Command = Field(description="Analysis to run")
    file: Path | None = Field(default=None, description="Problem file")
    output_format: Literal["human", "machine"] = Field(default="human", description="Report format")
    verbose: bool = Field(default=False, description="Enable verbose logging")
    log_level: str = Field(default="INFO", description="Logging level")
    check: CheckOptions | None = None
    noether: NoetherOptions | None = None
    density: DensityOptions | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CLIConfig":
        """Create configuration from parsed command line arguments."""
        try:
            config = cls(
                command=args.command,
                file=getattr(args, "file", None),
                output_format=args.format,
                verbose=args.verbose,
                log_level=args.log_level,
            )
            if args.command == "check":
                config.check = CheckOptions(which=args.which, samples=args.samples)
            elif args.command == "noether":
                config.noether = NoetherOptions(
                    tau=args.tau, xi=args.xi, solve_ode=args.solve_ode, x_ref=args.x_ref, report=args.report
                )
            elif args.command == "density":
                config.density = DensityOptions(n=args.n, grid=args.grid, mode=args.mode, out=args.out)
            return config
        except ValidationError as e:
            raise ValueError(f"Invalid CLI configuration: {e}") from e


def _add_common(parser: argparse.ArgumentParser) -> None:
    output_group = parser.add_argument_group("output", "Report options")
    output_group.add_argument(
        "--format",
        choices=["human", "machine"],
        default="human",
        help="Report format (default: %(default)s)",
    )

    # Logging configuration
    logging_group = parser.add_argument_group("logging", "Logging configuration")
    logging_group.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging",
    )
    logging_group.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default="INFO",
        help="Set logging level (default: %(default)s)",
    )


def create_argument_parser() -> argparse.ArgumentParser:
    """Create and configure the command line argument parser."""
    parser = argparse.ArgumentParser(
        prog="compvar",
        description="Variational problems with self-composition: residual checks, conservation laws and densities",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Euler-Lagrange residuals of a problem file
  %(prog)s check problem.json --which el

  # Conservation law of an explicit symmetry
  %(prog)s noether problem.json --tau "x^(-1/3)"

  # Solve the reduced tau ODE and save the report
  %(prog)s noether problem.json --solve-ode --report noether.txt --format machine

  # Invariant density of the file's map
  %(prog)s density problem.json --n 200 --grid 2000 --out density.dat

  # Built-in worked example
  %(prog)s verify-paper-example
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    check = commands.add_parser("check", help="Scan a residual along the candidate")
    check.add_argument("file", type=Path, help="Problem file (JSON)")
    check.add_argument(
        "--which",
        choices=["el", "dbr", "invariance"],
        default="el",
        help="Residual to scan (default: %(default)s)",
    )
    check.add_argument("--samples", type=int, default=None, help="Number of uniform sample points")
    _add_common(check)

    noether = commands.add_parser("noether", help="Gauge term, conserved quantity and verdict")
    noether.add_argument("file", type=Path, help="Problem file (JSON)")
    generator_group = noether.add_argument_group("generator", "Symmetry generator (default: the file's symmetry)")
    generator_group.add_argument("--tau", default=None, help="tau(x, q) expression")
    generator_group.add_argument("--xi", default=None, help="xi(x, q) expression")
    generator_group.add_argument("--solve-ode", action="store_true", help="Solve the reduced tau ODE with xi = 0")
    generator_group.add_argument("--x-ref", type=float, default=None, help="Normalization point (default: b)")
    noether.add_argument("--report", type=Path, default=None, help="Also write the report to this path")
    _add_common(noether)

    density = commands.add_parser("density", help="Invariant density of the file's map")
    density.add_argument("file", type=Path, help="Problem file (JSON)")
    density.add_argument("--n", type=int, default=None, help="Frobenius-Perron iterations")
    density.add_argument("--grid", type=int, default=None, help="Number of grid cells")
    density.add_argument("--mode", choices=["cesaro", "plain"], default=None, help="Averaging mode")
    density.add_argument("--out", type=Path, default=None, help="Two-column density output file")
    _add_common(density)

    verify = commands.add_parser("verify-paper-example", help="Run the built-in worked example")
    _add_common(verify)

    return parser


def parse_cli_args(args: list[str] | None = None) -> CLIConfig:
    """Parse command line arguments and return configuration."""
    parser = create_argument_parser()
    parsed_args = parser.parse_args(args)

    if parsed_args.command == "noether" and parsed_args.solve_ode and parsed_args.tau is not None:
        parser.error("--solve-ode cannot be combined with --tau")

    return CLIConfig.from_args(parsed_args)


def get_cli_help() -> str:
    """Get formatted help text for the CLI."""
    parser = create_argument_parser()
    return parser.format_help()
