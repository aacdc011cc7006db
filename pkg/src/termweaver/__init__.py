"""Termination analysis for general logic programs built from modules."""

__version__ = "0.1.0"
