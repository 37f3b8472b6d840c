"""Constraint-based fault localization for a small annotated imperative language."""

__version__ = "0.1.0"
