"""Stable commutator length laboratory for free groups."""
from .words import (
    Alphabet,
    AlphabetError,
    Chain,
    CyclicWord,
    Word,
    abelianization,
    chain,
    cyclic_reduce,
    invert,
    normalize_chain,
    parse_chain,
    reduce,
)

__version__ = "0.1.0"
