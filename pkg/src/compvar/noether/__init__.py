"""Symmetry generators, invariance residuals, gauge terms and conservation laws."""
