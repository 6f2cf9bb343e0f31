"""Logically decorated graphs: rewriting, substitution elimination and verification."""

__version__ = "0.1.0"
