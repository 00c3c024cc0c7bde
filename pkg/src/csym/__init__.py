"""Exact toolkit for cluster symmetric maps, their invariant Laurent polynomials,
generalized cluster seeds and Markov-type Diophantine equations."""

from .laurent import LaurentPoly, TypedLaurent, normalize_type
from .csm import ClusterSymmetricMap, DomainError, Seedlet

__all__ = [
    "ClusterSymmetricMap",
    "DomainError",
    "LaurentPoly",
    "Seedlet",
    "TypedLaurent",
    "normalize_type",
]

__version__ = "0.1.0"
