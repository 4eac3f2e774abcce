"""Tests for compvar commands."""
