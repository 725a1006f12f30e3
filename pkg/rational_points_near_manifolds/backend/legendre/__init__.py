"""Numerical Legendre transform."""
