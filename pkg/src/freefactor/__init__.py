"""Computations in the free factor complex: Whitehead word tests, Stallings
subgroup graphs, twist counts on Bass-Serre trees of free splittings, loop
families with lower-bound certificates, and fold-sequence diagnostics."""

__version__ = "0.1.0"

from .words import (  # noqa: F401
    Alphabet,
    CyclicWord,
    Word,
    conjugate,
    cyclic_reduce,
    inverse,
    is_proper_power,
    parse_word,
    power,
    reduce,
)
