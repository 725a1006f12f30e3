"""Symmetric matrix families with nonsingular pencils."""
