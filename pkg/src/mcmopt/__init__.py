"""Optimal multiplierless multiple constant multiplication via ILP models."""

__version__ = "0.1.0"
