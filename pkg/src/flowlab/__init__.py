"""flowlab: simulation and verification lab for Brownian-flow attraction/expansion bounds."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
