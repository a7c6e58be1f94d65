"""Positive braid rewriting, coherence certificates and little cubes checks."""

__version__ = "0.1.0"
