"""Two stacks in parallel: achievable permutations, operation sequences as
quarter-plane loops, and the corner-weighted loop series that counts them."""

from .machine import Permutation, canonical_sequence, execute, is_achievable

__version__ = "0.1.0"

__all__ = ["Permutation", "canonical_sequence", "execute", "is_achievable", "__version__"]
