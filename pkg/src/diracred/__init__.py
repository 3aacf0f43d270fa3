"""Exact singular reduction of Dirac structures under compact group actions."""

__version__ = "0.1.0"
