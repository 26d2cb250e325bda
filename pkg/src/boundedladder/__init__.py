"""Bounded bosonic ladder operators on truncated Fock spaces.

Weighted-shift creation/annihilation operators with a cutoff, their
regularized Heisenberg dynamics, quasi-coherent and truncated Gazeau-Klauder
states, and quon weight sequences.
"""
from .errors import LadderError
from .weights import WeightSequence, factorials, make_sequence, radius_estimate

__all__ = ["LadderError", "WeightSequence", "factorials", "make_sequence", "radius_estimate"]
__version__ = "0.1.0"
