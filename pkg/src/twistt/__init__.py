"""Derivation checker and finite-category semantics for a directed type
theory with twisted types."""

__version__ = "0.1.0"
