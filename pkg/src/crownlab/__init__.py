"""Permutation-group tools for checking generator-number bounds of minimally
transitive groups, crown-based powers and prime sets of simple groups."""

from .caps import CapExceeded, Caps, HypothesisError, get_caps, set_caps
from .group import PermGroup, StabilizerChain
from .perm import Permutation

__all__ = [
    "CapExceeded",
    "Caps",
    "HypothesisError",
    "PermGroup",
    "Permutation",
    "StabilizerChain",
    "get_caps",
    "set_caps",
]
__version__ = "0.1.0"
