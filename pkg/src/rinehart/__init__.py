"""Exact computations with Lie-Rinehart algebras, their extensions and Chern-Weil classes."""

__version__ = "0.1.0"
