"""Deterministic core of a drug-discovery screening pipeline."""

__version__ = "0.1.0"
