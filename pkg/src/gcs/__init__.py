"""Spin Calogero-Sutherland systems over simple Lie algebras."""

__version__ = "0.1.0"
