"""Tests for compvar.noether."""
