"""Verification toolkit for metric small cancellation arguments.

Word algebra, symmetrized presentations with exact piece ratios, Dehn
reduction, combinatorial surface maps with curvature weight tests, periodic
multi-car motions with exact collision detection, and theorem scan harnesses.
"""

__version__ = "0.1.0"

from .words import (
    CyclicWord,
    WicksDecomposition,
    Word,
    cyclic_reduce,
    exponent_sum,
    free_reduce,
    is_proper_power,
    power,
    wicks_commutator_test,
)

__all__ = [
    "CyclicWord",
    "WicksDecomposition",
    "Word",
    "cyclic_reduce",
    "exponent_sum",
    "free_reduce",
    "is_proper_power",
    "power",
    "wicks_commutator_test",
]
