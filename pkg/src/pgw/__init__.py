"""Finite p-group toolkit: pc presentations, collection arithmetic,
structure computations, non-inner order-p automorphism construction,
and an independent brute-force oracle."""

__version__ = "0.1.0"
