"""Holonomy, parallel metrics and irreducibility checks for polynomial connections."""

__version__ = "0.1.0"
