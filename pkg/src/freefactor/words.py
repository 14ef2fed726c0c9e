"""Exact word arithmetic in a finitely generated free group.

A word is a freely reduced sequence of nonzero signed integers: letter
``+i`` is the i-th generator (1-indexed), ``-i`` its inverse.  The ASCII
codec used by every file format and CLI flag maps generator ``i`` to the
i-th lowercase letter and its inverse to the corresponding uppercase
letter (``a=1``, ``A=-1``, ...).  The codec caps rank at 26; the
arithmetic itself has no rank limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

__all__ = [
    "Alphabet",
    "Word",
    "CyclicWord",
    "reduce_letters",
    "reduce",
    "parse_word",
    "inverse",
    "conjugate",
    "power",
    "cyclic_reduce",
    "is_proper_power",
    "support",
]

_CODEC_LIMIT = 26


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence by stack cancellation.

    >>> reduce_letters([1, 2, -2])
    (1,)
    >>> reduce_letters([1, -1])
    ()
    """
    out: list[int] = []
    for letter in letters:
        if letter == 0:
            raise ValueError("0 is not a valid letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cancellation(u: tuple[int, ...], v: tuple[int, ...]) -> int:
    """Number of letters cancelled at the junction of reduced words u, v."""
    k = 0
    n = min(len(u), len(v))
    while k < n and u[-1 - k] == -v[k]:
        k += 1
    return k


def concat(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    """Reduced product of two already-reduced letter tuples."""
    k = cancellation(u, v)
    return u[: len(u) - k] + v[k:]


def invert_letters(u: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-letter for letter in reversed(u))


@dataclass(frozen=True)
class Alphabet:
    """Ranked signed alphabet of the free group F_n."""

    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")

    def signed_letters(self) -> tuple[int, ...]:
        """All 2n signed letters in the order 1, -1, 2, -2, ..."""
        out = []
        for i in range(1, self.rank + 1):
            out.extend((i, -i))
        return tuple(out)

    def __contains__(self, letter: int) -> bool:
        return letter != 0 and abs(letter) <= self.rank

    def check_word(self, w: "Word") -> None:
        for letter in w.letters:
            if letter not in self:
                raise ValueError(
                    f"letter {letter} out of range for rank {self.rank}"
                )


@dataclass(frozen=True)
class Word:
    """A freely reduced word.  The empty word is the identity."""

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        for i, letter in enumerate(letters):
            if letter == 0:
                raise ValueError("0 is not a valid letter")
            if i and letters[i - 1] == -letter:
                raise ValueError(
                    f"word {letters} is not freely reduced at position {i}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(concat(self.letters, other.letters))

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters))

    def max_index(self) -> int:
        return max((abs(letter) for letter in self.letters), default=0)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def __str__(self) -> str:
        chars = []
        for letter in self.letters:
            if abs(letter) > _CODEC_LIMIT:
                raise ValueError(f"letter {letter} beyond the a-z codec")
            base = ord("a") if letter > 0 else ord("A")
            chars.append(chr(base + abs(letter) - 1))
        return "".join(chars)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


@dataclass(frozen=True, eq=False)
class CyclicWord:
    """A cyclically reduced word considered up to rotation.

    The representative keeps the rotation it was built with; equality and
    hashing go through the least rotation.
    """

    representative: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        rep = tuple(self.representative)
        object.__setattr__(self, "representative", rep)
        word = Word(rep)
        if not word.is_cyclically_reduced():
            raise ValueError(f"{rep} is not cyclically reduced")

    @classmethod
    def from_word(cls, w: "Word | CyclicWord") -> "CyclicWord":
        """Cyclically reduce a word, discarding the conjugator."""
        if isinstance(w, CyclicWord):
            return w
        core, _ = cyclic_reduce(w)
        return core

    @cached_property
    def canonical(self) -> tuple[int, ...]:
        rep = self.representative
        if len(rep) <= 1:
            return rep
        return min(rep[i:] + rep[:i] for i in range(len(rep)))

    @property
    def word(self) -> Word:
        return Word(self.representative)

    def rotations(self) -> Iterator[tuple[int, ...]]:
        rep = self.representative
        for i in range(max(len(rep), 1)):
            yield rep[i:] + rep[:i]

    def __len__(self) -> int:
        return len(self.representative)

    def __bool__(self) -> bool:
        return bool(self.representative)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclicWord):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash(self.canonical)

    def __str__(self) -> str:
        return str(self.word)

    def __repr__(self) -> str:
        return f"CyclicWord({str(self)!r})"


def reduce(raw: Iterable[int] | Word) -> Word:
    """Freely reduce a raw letter sequence into a Word.

    >>> reduce([1, 2, -2])
    Word('a')
    >>> reduce([1, -1])
    Word('')
    """
    if isinstance(raw, Word):
        return raw
    return Word(reduce_letters(raw))


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse the ASCII codec: lowercase generators, uppercase inverses.

    The empty string is the identity; characters beyond the given rank are
    rejected.  Input that is not freely reduced is reduced on the way in.

    >>> parse_word("abA")
    Word('abA')
    >>> parse_word("abB")
    Word('a')
    """
    letters = []
    for ch in text:
        if "a" <= ch <= "z":
            letter = ord(ch) - ord("a") + 1
        elif "A" <= ch <= "Z":
            letter = -(ord(ch) - ord("A") + 1)
        else:
            raise ValueError(f"invalid word character {ch!r}")
        if rank is not None and abs(letter) > rank:
            raise ValueError(f"letter {ch!r} beyond rank {rank}")
        letters.append(letter)
    return Word(reduce_letters(letters))


def inverse(w: Word) -> Word:
    return w.inverse()


def conjugate(w: Word, g: Word) -> Word:
    """The reduced form of g w g^-1."""
    return Word(concat(concat(g.letters, w.letters), invert_letters(g.letters)))


def power(w: Word, k: int) -> Word:
    """The reduced form of w^k (k may be negative or zero)."""
    if k == 0:
        return Word()
    if k < 0:
        return power(w.inverse(), -k)
    core, conj = _split_cyclic(w.letters)
    body: tuple[int, ...] = core * k
    return Word(concat(concat(conj, body), invert_letters(conj)))


def _split_cyclic(letters: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a reduced word as conj * core * conj^-1 with core cyclically reduced."""
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return letters[i:j], letters[:i]


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Cyclically reduce: returns (core, conjugator) with w = g * core * g^-1.

    >>> cyclic_reduce(parse_word("abA"))
    (CyclicWord('b'), Word('a'))
    """
    core, conj = _split_cyclic(w.letters)
    return CyclicWord(core), Word(conj)


def is_proper_power(w: Word | CyclicWord) -> tuple[bool, Word, int]:
    """Decide whether w = u^k for some k >= 2; returns (flag, root, exponent).

    The root and exponent always reconstruct w (root = w, exponent = 1 when
    w is not a proper power).  Requires a nonempty, cyclically reduced word.
    """
    letters = w.representative if isinstance(w, CyclicWord) else w.letters
    if not letters:
        raise ValueError("the empty word has no root")
    if isinstance(w, Word) and not w.is_cyclically_reduced():
        raise ValueError("is_proper_power requires a cyclically reduced word")
    n = len(letters)
    for d in range(1, n):
        if n % d:
            continue
        if all(letters[i] == letters[i % d] for i in range(n)):
            return True, Word(letters[:d]), n // d
    return False, Word(letters), 1


def support(w: Word | CyclicWord) -> frozenset[int]:
    """The set of unsigned generator indices occurring in w."""
    letters = w.representative if isinstance(w, CyclicWord) else w.letters
    return frozenset(abs(letter) for letter in letters)
