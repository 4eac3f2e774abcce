"""Test fixtures for CLI tests."""

from argparse import ArgumentParser

import pytest

from compvar.config.cli import create_argument_parser


@pytest.fixture
def argument_parser() -> ArgumentParser:
    """Create a CLI argument parser for testing."""
    return create_argument_parser()


@pytest.fixture(autouse=True)
def isolated_logging(restore_logging: None) -> None:
    """main() configures logging; undo it after every CLI test."""
