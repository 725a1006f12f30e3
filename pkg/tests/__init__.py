"""The test suite module."""
