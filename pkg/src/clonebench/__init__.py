"""Numerical toolkit for qubit cloning machines on finite Bloch-sphere input sets."""

__version__ = "0.1.0"

from . import cloners, fidelity, optimize, qlinalg, states

__all__ = ["cloners", "fidelity", "optimize", "qlinalg", "states", "__version__"]
