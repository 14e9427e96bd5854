"""Weighted cubical singular homology: exact chain-level verification and
homology computations on finite cubical models."""

__version__ = "0.1.0"
