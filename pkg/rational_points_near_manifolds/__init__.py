"""This module implements a toolkit for counting rational points near graph-parametrized manifolds."""
