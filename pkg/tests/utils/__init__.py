"""Tests for compvar.utils."""
