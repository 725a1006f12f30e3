"""Smooth maps, weight functions and manifold charts."""
