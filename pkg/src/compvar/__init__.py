"""compvar - variational problems whose Lagrangians contain the composition q(q(x))."""

__version__ = "0.1.0"
