"""Symmetric solutions of the sixth Painleve equation and their monodromy."""

from .errors import *  # noqa: F401,F403
from .pvi_core import OMEGA, PhaseState, PviParams
from .specfun import ToleranceConfig

__all__ = ["OMEGA", "PhaseState", "PviParams", "ToleranceConfig"]
__version__ = "0.1.0"
