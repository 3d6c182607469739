"""Bit-parallel string matching and its reversible-circuit / Grover translation."""

__version__ = "0.1.0"
