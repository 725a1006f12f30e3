"""Enumeration of rational points near and on charts."""
