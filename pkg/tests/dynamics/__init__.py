"""Tests for compvar.dynamics."""
