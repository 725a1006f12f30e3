"""Oscillatory integrals and (non-)stationary phase checks."""
