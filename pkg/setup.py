#!/usr/bin/env python

"""setup.py: Controls the setup process using setuptools."""

import re

from setuptools import find_packages, setup

version = re.search(
    r'^__version__\s*=\s*"(.*)"',
    open('rational_points_near_manifolds/version.py').read(),
    re.M
).group(1)

with open("README.md", "rb") as f:
    long_description = f.read().decode("utf-8")

setup(
    name="rational_points_near_manifolds",
    packages=find_packages(exclude=["tests", "tests.*"]),
    entry_points={
        "console_scripts": [
            'rational_points_near_manifolds = rational_points_near_manifolds.__main__:main',
            'rational-points-near-manifolds = rational_points_near_manifolds.__main__:main',
        ]
    },
    version=version,
    description="Counting rational points near graph-parametrized manifolds, including a CLI tool.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="",
    python_requires=">=3.11",
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.10',
        'sympy>=1.12',
        'pytest>=7.1.2',
        'pytest-subtests>=0.8.0',
        'colorama>=0.4.4',
    ],
)
