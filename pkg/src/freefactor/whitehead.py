"""Whitehead automorphisms, length minimization, and the primitivity and
filling tests built on them.

Both predicates accept words whose generator indices exceed the ambient
rank as long as the support fits: the support is then identified with a
sub-basis (so ``is_filling("bbccdd", 3)`` asks whether b^2c^2d^2 fills the
rank-3 group on b, c, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .words import (
    CyclicWord,
    Word,
    cyclic_reduce,
    reduce_letters,
    support,
)

__all__ = [
    "SignedPermutation",
    "WhiteheadMove",
    "WhiteheadAutomorphism",
    "WhiteheadGraph",
    "apply_automorphism",
    "apply_cyclic",
    "inverse_automorphism",
    "type_ii_moves",
    "minimize",
    "whitehead_graph",
    "is_primitive",
    "is_filling",
]


@dataclass(frozen=True)
class SignedPermutation:
    """Type-I Whitehead automorphism: a signed permutation of the letters.

    ``images[i-1]`` is the (signed) image of generator i.
    """

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        seen = {abs(letter) for letter in self.images}
        if 0 in seen or seen != set(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a signed permutation")

    def letter_image(self, letter: int) -> tuple[int, ...]:
        image = self.images[abs(letter) - 1]
        return (image,) if letter > 0 else (-image,)


@dataclass(frozen=True)
class WhiteheadMove:
    """Type-II Whitehead automorphism (multiplier a, letter set Z with a in Z).

    Letters x outside {a, a^-1} map to x, xa, a^-1 x or a^-1 x a according
    to membership of x and x^-1 in Z; a itself is fixed.
    """

    multiplier: int
    members: frozenset[int]

    def __post_init__(self) -> None:
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        if self.multiplier not in members:
            raise ValueError("multiplier must belong to the member set")
        if -self.multiplier in members:
            raise ValueError("member set may not contain the multiplier inverse")

    def letter_image(self, letter: int) -> tuple[int, ...]:
        a = self.multiplier
        if letter == a or letter == -a:
            return (letter,)
        out = []
        if -letter in self.members:
            out.append(-a)
        out.append(letter)
        if letter in self.members:
            out.append(a)
        return tuple(out)


WhiteheadAutomorphism = Union[SignedPermutation, WhiteheadMove]


def apply_automorphism(aut: WhiteheadAutomorphism, w: Word) -> Word:
    """Apply a Whitehead automorphism letterwise and reduce."""
    out: list[int] = []
    for letter in w.letters:
        for image in aut.letter_image(letter):
            if out and out[-1] == -image:
                out.pop()
            else:
                out.append(image)
    return Word(tuple(out))


def apply_cyclic(aut: WhiteheadAutomorphism, w: CyclicWord) -> CyclicWord:
    """Image of a cyclic word: apply to the representative, cyclically reduce."""
    core, _ = cyclic_reduce(apply_automorphism(aut, w.word))
    return core


def inverse_automorphism(aut: WhiteheadAutomorphism) -> WhiteheadAutomorphism:
    if isinstance(aut, SignedPermutation):
        inverse = [0] * len(aut.images)
        for i, image in enumerate(aut.images):
            inverse[abs(image) - 1] = (i + 1) if image > 0 else -(i + 1)
        return SignedPermutation(tuple(inverse))
    a = aut.multiplier
    members = (aut.members - {a}) | {-a}
    return WhiteheadMove(-a, members)


def _letter_order(rank: int) -> tuple[int, ...]:
    out = []
    for i in range(1, rank + 1):
        out.extend((i, -i))
    return tuple(out)


def type_ii_moves(rank: int) -> Iterator[WhiteheadMove]:
    """All nontrivial type-II moves, in lexicographic (multiplier, subset) order.

    Multipliers run through 1, -1, 2, -2, ...; for each, subsets of the
    remaining 2n-2 letters are enumerated in binary-counter order.
    """
    order = _letter_order(rank)
    for a in order:
        others = [letter for letter in order if letter != a and letter != -a]
        for mask in range(1, 1 << len(others)):
            chosen = {others[i] for i in range(len(others)) if mask >> i & 1}
            yield WhiteheadMove(a, frozenset(chosen | {a}))


def minimize(
    w: Word | CyclicWord, rank: int
) -> tuple[CyclicWord, tuple[WhiteheadMove, ...]]:
    """Whitehead-minimize the cyclic length of w.

    Scans type-II moves in the fixed deterministic order and applies the
    first strictly shortening one, repeating to a fixpoint.  Returns the
    minimal cyclic word and the transcript of applied moves (composing the
    transcript in order carries [w] to the output).  Inputs are cyclically
    reduced automatically.
    """
    current = CyclicWord.from_word(w if isinstance(w, CyclicWord) else w)
    if current and max(abs(l) for l in current.representative) > rank:
        raise ValueError("word letters exceed the given rank")
    moves = tuple(type_ii_moves(rank))
    transcript: list[WhiteheadMove] = []
    improved = True
    while improved and current:
        improved = False
        for move in moves:
            image = apply_cyclic(move, current)
            if len(image) < len(current):
                current = image
                transcript.append(move)
                improved = True
                break
    return current, tuple(transcript)


@dataclass(frozen=True)
class WhiteheadGraph:
    """Whitehead graph of a cyclic word: vertices are the 2n signed letters,
    one edge {x^-1, y} per cyclically adjacent letter pair (x, y)."""

    rank: int
    edges: tuple[tuple[int, int], ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return _letter_order(self.rank)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for x, y in self.edges:
            adj[x].add(y)
            adj[y].add(x)
        return adj

    def is_connected(self) -> bool:
        vertices = self.vertices
        adj = self.adjacency()
        seen = {vertices[0]}
        stack = [vertices[0]]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(vertices)

    def has_cut_vertex(self) -> bool:
        """Check for articulation points by vertex deletion (graphs are tiny)."""
        vertices = self.vertices
        adj = self.adjacency()
        for v in vertices:
            rest = [u for u in vertices if u != v]
            if not rest:
                continue
            seen = {rest[0]}
            stack = [rest[0]]
            while stack:
                for u in adj[stack.pop()]:
                    if u != v and u not in seen:
                        seen.add(u)
                        stack.append(u)
            if len(seen) != len(rest):
                return True
        return False


def _edge_key(letter: int) -> tuple[int, int]:
    return (abs(letter), 0 if letter > 0 else 1)


def whitehead_graph(w: Word | CyclicWord, rank: int) -> WhiteheadGraph:
    """Build the Whitehead graph of a nonempty cyclic word."""
    cyc = CyclicWord.from_word(w)
    if not cyc:
        raise ValueError("the empty word has no Whitehead graph")
    rep = cyc.representative
    if max(abs(l) for l in rep) > rank:
        raise ValueError("word letters exceed the given rank")
    edges = []
    for i, x in enumerate(rep):
        y = rep[(i + 1) % len(rep)]
        pair = tuple(sorted((-x, y), key=_edge_key))
        edges.append((pair[0], pair[1]))
    edges.sort(key=lambda e: (_edge_key(e[0]), _edge_key(e[1])))
    return WhiteheadGraph(rank, tuple(edges))


def _fit_to_rank(w: Word, rank: int) -> Word:
    """Identify w's letters with letters of F_rank.

    Words whose maximal index fits are taken as they stand; otherwise the
    support is relabeled order-preservingly into an initial sub-basis.
    """
    if not w:
        raise ValueError("empty word")
    if w.max_index() <= rank:
        return w
    used = sorted(support(w))
    if len(used) > rank:
        raise ValueError(
            f"word uses {len(used)} distinct generators, rank is only {rank}"
        )
    relabel = {index: i + 1 for i, index in enumerate(used)}
    return Word(
        tuple(
            relabel[abs(l)] if l > 0 else -relabel[abs(l)]
            for l in w.letters
        )
    )


def is_primitive(w: Word, rank: int) -> bool:
    """True iff w is a member of some basis of F_rank.

    Computed as: the Whitehead-minimized cyclic core has cyclic length 1.
    """
    fitted = _fit_to_rank(w, rank)
    minimal, _ = minimize(fitted, rank)
    return len(minimal) == 1


def is_filling(w: Word, rank: int) -> bool:
    """True iff no proper free factor of F_rank contains w up to conjugacy.

    Whitehead-minimize the cyclic core, then test the Whitehead graph for
    connectivity and cut vertices.
    """
    fitted = _fit_to_rank(w, rank)
    minimal, _ = minimize(fitted, rank)
    if not minimal:
        raise ValueError("the trivial word fills nothing")
    graph = whitehead_graph(minimal, rank)
    return graph.is_connected() and not graph.has_cut_vertex()
