"""Volumes of generalized hyperbolic polyhedra in the Klein model."""

from ._core import *  # noqa: F401,F403
from ._core import PolyvolError, corpus, shapes  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
