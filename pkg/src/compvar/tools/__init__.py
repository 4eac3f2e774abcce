"""Command implementations behind the compvar CLI."""
