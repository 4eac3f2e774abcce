"""Tests for compvar.variational."""
