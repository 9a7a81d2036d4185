"""Exact computations in automaton groups acting on the binary tree, with a
verification harness for the branch structure of IMG(z^2 + i)."""

__version__ = "0.1.0"
