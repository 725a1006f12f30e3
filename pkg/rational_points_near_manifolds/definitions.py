"""This module implements global definitions for the complete package."""
import os
import pathlib

ROOT_DIR = pathlib.Path(os.path.dirname(os.path.abspath(__file__))).parent
RES_DIR = ROOT_DIR.joinpath("res")
MANIFOLD_DIR = RES_DIR.joinpath("manifolds")
EXPERIMENT_DIR = RES_DIR.joinpath("experiments")

RESULTS_DIR_ENV_VAR = "RPNM_RESULTS_DIR"


def results_dir():
    """Gets the directory for run records and CSV result rows.

    Returns:
        The results directory (the environment override if set).
    """
    override = os.environ.get(RESULTS_DIR_ENV_VAR)
    if override:
        return pathlib.Path(override)
    return ROOT_DIR.joinpath("results")
