"""Main entry point for compvar."""

import sys

from pydantic import ValidationError as SchemaError

from compvar.config.cli import CLIConfig, parse_cli_args
from compvar.config.constants import (
    EXIT_CODE_EVALUATION,
    EXIT_CODE_KEYBOARD_INTERRUPT,
    EXIT_CODE_OK,
    EXIT_CODE_SCHEMA,
    EXIT_CODE_TOLERANCE,
)
from compvar.core.exceptions import (
    CompVarError,
    ExpressionSyntaxError,
    UnknownFunctionError,
    UnknownVariableError,
    ValidationError,
)
from compvar.core.models import BaseResult
from compvar.tools.check import CheckTool
from compvar.tools.density import DensityTool
from compvar.tools.noether import NoetherTool
from compvar.tools.worked_example import WorkedExampleTool
from compvar.utils.formatting import render
from compvar.utils.logging import setup_logging

# Input errors that map to the schema exit code
INPUT_ERRORS = (ValidationError, ExpressionSyntaxError, UnknownVariableError, UnknownFunctionError, SchemaError)


def execute(config: CLIConfig) -> BaseResult:
    """Run the configured command and return its report."""
    if config.command == "verify-paper-example":
        return WorkedExampleTool().execute()
    if config.file is None:
        raise ValidationError(f"'{config.command}' needs a problem file")

    if config.check is not None:
        return CheckTool.from_file(config.file).execute(config.check.which, config.check.samples)
    if config.noether is not None:
        options = config.noether
        noether = NoetherTool.from_file(config.file)
        report = noether.execute(options.tau, options.xi, options.solve_ode, options.x_ref)
        if options.report is not None:
            noether.write_report(report, options.report, config.output_format)
        return report
    if config.density is not None:
        density = config.density
        return DensityTool.from_file(config.file).execute(density.n, density.grid, density.mode, density.out)
    raise ValidationError(f"Unknown command '{config.command}'")


def main(args: list[str] | None = None) -> None:
    """Main application entry point."""
    try:
        # Parse command line arguments
        config = parse_cli_args(args)

        # Setup logging with CLI configuration
        log_level = config.log_level
        if config.verbose:
            log_level = "DEBUG"
        setup_logging(level=log_level)

        result = execute(config)
        sys.stdout.write(render(result, config.output_format))
        sys.exit(EXIT_CODE_OK if getattr(result, "passed", True) else EXIT_CODE_TOLERANCE)

    except INPUT_ERRORS as e:
        print(f"Input error: {e}", file=sys.stderr)
        sys.exit(EXIT_CODE_SCHEMA)
    except CompVarError as e:
        print(f"Evaluation error: {e}", file=sys.stderr)
        sys.exit(EXIT_CODE_EVALUATION)
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(EXIT_CODE_SCHEMA)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(EXIT_CODE_KEYBOARD_INTERRUPT)
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        sys.exit(EXIT_CODE_EVALUATION)


if __name__ == "__main__":
    main()
