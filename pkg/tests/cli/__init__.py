"""Tests for compvar CLI functionality."""
