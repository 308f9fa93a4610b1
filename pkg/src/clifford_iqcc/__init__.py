"""Clifford-circuit iterative qubit coupled cluster (iQCC) engine."""

from .pauli import (
    DimensionError,
    PauliWord,
    QubitOperator,
    commutator,
    commutes,
    flip_indices,
    max_term_count,
    multiply,
    prune,
)

__all__ = [
    "DimensionError",
    "PauliWord",
    "QubitOperator",
    "commutator",
    "commutes",
    "flip_indices",
    "max_term_count",
    "multiply",
    "prune",
]
