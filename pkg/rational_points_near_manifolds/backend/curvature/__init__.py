"""Verification of the Hessian pencil curvature condition."""
