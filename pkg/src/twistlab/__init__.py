"""Exact computations with one-sided twisted complexes over presented dg-categories."""

__version__ = "0.1.0"
