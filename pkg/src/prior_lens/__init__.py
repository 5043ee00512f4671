"""Bayesian prediction functions and implicit-prior recovery for everyday forecasts."""

__version__ = "0.1.0"
