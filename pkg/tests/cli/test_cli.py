"""Focused tests for CLI functionality."""

from argparse import ArgumentParser
from pathlib import Path

import pytest

from compvar.config.cli import CLIConfig, get_cli_help, parse_cli_args


class TestArgumentParsing:
    """Test basic argument parsing behavior."""

    def test_check_defaults(self, argument_parser: ArgumentParser) -> None:
        """Test check with only a problem file."""
        args = argument_parser.parse_args(["check", "problem.json"])
        assert args.command == "check"
        assert args.file == Path("problem.json")
        assert args.which == "el"
        assert args.format == "human"

    def test_check_which(self, argument_parser: ArgumentParser) -> None:
        """Test every residual choice."""
        for which in ["el", "dbr", "invariance"]:
            args = argument_parser.parse_args(["check", "problem.json", "--which", which])
            assert args.which == which

    def test_noether_options(self, argument_parser: ArgumentParser) -> None:
        """Test explicit generator and report path."""
        args = argument_parser.parse_args(
            ["noether", "problem.json", "--tau", "x^(-1/3)", "--xi", "0", "--report", "out.txt"]
        )
        assert args.tau == "x^(-1/3)"
        assert args.xi == "0"
        assert args.report == Path("out.txt")
        assert args.solve_ode is False

    def test_density_options(self, argument_parser: ArgumentParser) -> None:
        """Test density iteration, grid and mode."""
        args = argument_parser.parse_args(
            ["density", "problem.json", "--n", "200", "--grid", "2000", "--mode", "plain"]
        )
        assert (args.n, args.grid, args.mode) == (200, 2000, "plain")

    def test_verify_needs_no_file(self, argument_parser: ArgumentParser) -> None:
        """Test the worked example command."""
        args = argument_parser.parse_args(["verify-paper-example", "--format", "machine"])
        assert args.command == "verify-paper-example"
        assert args.format == "machine"

    def test_verbose_flag(self, argument_parser: ArgumentParser) -> None:
        """Test verbose logging flag."""
        args = argument_parser.parse_args(["check", "problem.json", "--verbose"])
        assert args.verbose is True

    def test_log_level_options(self, argument_parser: ArgumentParser) -> None:
        """Test various log level settings."""
        for level in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            args = argument_parser.parse_args(["check", "problem.json", "--log-level", level])
            assert args.log_level == level

    def test_missing_command(self, argument_parser: ArgumentParser) -> None:
        """Test that a command is required."""
        with pytest.raises(SystemExit):
            argument_parser.parse_args([])

    def test_invalid_which(self, argument_parser: ArgumentParser) -> None:
        """Test invalid residual raises SystemExit."""
        with pytest.raises(SystemExit):
            argument_parser.parse_args(["check", "problem.json", "--which", "hamilton"])

    def test_invalid_format(self, argument_parser: ArgumentParser) -> None:
        """Test invalid report format raises SystemExit."""
        with pytest.raises(SystemExit):
            argument_parser.parse_args(["check", "problem.json", "--format", "xml"])

    def test_invalid_grid_type(self, argument_parser: ArgumentParser) -> None:
        """Test non-integer grid raises SystemExit."""
        with pytest.raises(SystemExit):
            argument_parser.parse_args(["density", "problem.json", "--grid", "fine"])


class TestValidation:
    """Test core business logic validation."""

    def test_solve_ode_with_tau_raises_error(self) -> None:
        """--solve-ode and --tau are mutually exclusive."""
        with pytest.raises(SystemExit):
            parse_cli_args(["noether", "problem.json", "--solve-ode", "--tau", "1"])

    def test_too_few_samples_rejected(self) -> None:
        """Sample counts below the scan minimum are configuration errors."""
        with pytest.raises(ValueError, match="Invalid CLI configuration"):
            parse_cli_args(["check", "problem.json", "--samples", "3"])

    def test_zero_iterations_rejected(self) -> None:
        """Density iteration counts must be positive."""
        with pytest.raises(ValueError):
            parse_cli_args(["density", "problem.json", "--n", "0"])


class TestCLIConfig:
    """Test CLIConfig creation."""

    def test_check_config(self) -> None:
        """Test check options are carried over."""
        config = parse_cli_args(["check", "problem.json", "--which", "dbr", "--samples", "500"])
        assert isinstance(config, CLIConfig)
        assert config.check is not None
        assert config.check.which == "dbr"
        assert config.check.samples == 500
        assert config.noether is None
        assert config.density is None

    def test_noether_solve_ode_config(self) -> None:
        """Test the solved-ODE variant."""
        config = parse_cli_args(["noether", "problem.json", "--solve-ode", "--x-ref", "0.5"])
        assert config.noether is not None
        assert config.noether.solve_ode is True
        assert config.noether.x_ref == 0.5
        assert config.noether.tau is None

    def test_density_config(self) -> None:
        """Unset density options stay None so the file's section applies."""
        config = parse_cli_args(["density", "problem.json"])
        assert config.density is not None
        assert config.density.n is None
        assert config.density.grid is None
        assert config.density.mode is None

    def test_verify_config(self) -> None:
        """The worked example has no file and no options."""
        config = parse_cli_args(["verify-paper-example"])
        assert config.file is None
        assert config.check is None

    def test_logging_config(self) -> None:
        """Test logging options are carried over."""
        config = parse_cli_args(["check", "problem.json", "--log-level", "WARNING", "-v"])
        assert config.log_level == "WARNING"
        assert config.verbose is True


class TestHelp:
    """Test help output."""

    def test_help_lists_commands(self) -> None:
        """Every command appears in the help text."""
        text = get_cli_help()
        for command in ["check", "noether", "density", "verify-paper-example"]:
            assert command in text
