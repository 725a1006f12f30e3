"""Experiment orchestration and fits."""
