"""Compositional and classical variational problems, functionals and residuals."""
