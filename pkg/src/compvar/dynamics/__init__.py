"""Piecewise-monotone interval maps and Frobenius-Perron densities."""
