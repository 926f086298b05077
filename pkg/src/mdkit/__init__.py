"""Metric dimension: exact solver, hardness gadgets and kernelization."""

__version__ = "0.1.0"
