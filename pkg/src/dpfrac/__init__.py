"""Desk-scale tools for fractional DP-coloring."""

__version__ = "0.1.0"
