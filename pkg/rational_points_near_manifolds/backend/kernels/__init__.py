"""Trigonometric kernels: Selberg majorants and the Fejér kernel."""
