"""Configuration management for compvar."""
