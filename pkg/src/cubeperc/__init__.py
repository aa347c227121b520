"""Percolation experiments and exhaustive checks on the binary hypercube."""

__version__ = "0.1.0"
