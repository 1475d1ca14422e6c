"""Symbolic verification and bosonic-limit simulation of the fused integrable defect
in the N=2 super sinh-Gordon model."""

__version__ = "0.1.0"
