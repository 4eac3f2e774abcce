"""Core components for compvar."""
