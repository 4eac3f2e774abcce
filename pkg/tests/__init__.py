"""Test package for compvar."""
