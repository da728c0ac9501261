"""Sensitivity analysis for single-mode continuous-variable quantum metrology."""

__version__ = "0.1.0"
