"""Relational phase folding for hybrid quantum programs."""

__version__ = "0.1.0"
