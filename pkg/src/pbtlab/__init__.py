"""Numerical laboratory for port-based teleportation under pure dephasing."""

from . import closedform, ensemble, fidelity, linops, povm, spinboson

__all__ = ["closedform", "ensemble", "fidelity", "linops", "povm", "spinboson"]

__version__ = "0.1.0"
