"""Exact and numeric tools for tau-functions of Toda-type hierarchies and their q-deformations."""

__version__ = "0.1.0"
