"""Verification engine for cotorsion pairs in trivial extensions of module categories."""

__version__ = "0.1.0"
