"""Tests for compvar.expr."""
