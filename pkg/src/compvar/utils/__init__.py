"""Utility functions for compvar."""
