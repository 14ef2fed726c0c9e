"""Stallings core graphs of finitely generated subgroups.

Folding, membership, conjugate inclusion via immersions of cyclic cores,
Nielsen-transcript basis recognition, and rewriting in a new basis.  The
basis machinery keeps transcripts so the change of basis can be inverted;
plain true/false basis questions are answered by folding, which is much
cheaper.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .whitehead import (
    WhiteheadAutomorphism,
    apply_automorphism,
    apply_cyclic,
    inverse_automorphism,
    type_ii_moves,
)
from .words import (
    CyclicWord,
    Word,
    cancellation,
    concat,
    invert_letters,
    parse_word,
)

__all__ = [
    "CoreGraph",
    "NielsenMove",
    "NielsenTranscript",
    "NotFreeFactorError",
    "fold",
    "is_conjugate_into",
    "is_basis",
    "generates_free_group",
    "rewrite_in_basis",
    "substitute",
    "minimize_tuple",
    "is_free_factor",
    "free_factor_complement",
]


class NotFreeFactorError(ValueError):
    """Raised when a tuple fails free-factor certification."""


class CoreGraph:
    """A folded, labeled core graph.

    ``adj[v]`` maps a signed label to the vertex reached by crossing an
    edge with that label from v.  With a basepoint present, every vertex
    of degree <= 1 is the basepoint; without one, no such vertices exist.
    Instances are immutable once built.
    """

    __slots__ = ("_adj", "basepoint")

    def __init__(self, adj: Sequence[dict[int, int]], basepoint: int | None):
        self._adj = tuple(dict(d) for d in adj)
        self.basepoint = basepoint

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return sum(len(d) for d in self._adj) // 2

    @property
    def rank(self) -> int:
        """First Betti number = rank of the subgroup the graph carries."""
        if not self._adj:
            return 0
        return self.edge_count - self.vertex_count + 1

    def darts(self, v: int) -> dict[int, int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self) -> Iterable[tuple[int, int, int]]:
        """Yield (tail, label, head) once per geometric edge, labels positive."""
        for v, darts in enumerate(self._adj):
            for label, head in darts.items():
                if label > 0:
                    yield (v, label, head)

    def contains(self, w: Word) -> bool:
        """Membership by tracing from the basepoint."""
        if self.basepoint is None:
            raise ValueError("membership needs a basepointed graph")
        v = self.basepoint
        for letter in w.letters:
            nxt = self._adj[v].get(letter)
            if nxt is None:
                return False
            v = nxt
        return v == self.basepoint

    def cyclic_core(self) -> "CoreGraph":
        """Basepoint-free core: trim all hanging trees, basepoint included."""
        adj = [dict(d) for d in self._adj]
        alive, mapping = _trim(adj, basepoint=None)
        return _compact(adj, alive, mapping, basepoint=None)

    def to_json(self) -> dict:
        return {
            "vertices": list(range(self.vertex_count)),
            "edges": [
                [tail, str(Word((label,))), head]
                for tail, label, head in sorted(self.edges())
            ],
            "basepoint": self.basepoint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoreGraph":
        n = len(data["vertices"])
        adj: list[dict[int, int]] = [{} for _ in range(n)]
        for tail, label_str, head in data["edges"]:
            label = parse_word(label_str).letters[0]
            adj[tail][label] = head
            adj[head][-label] = tail
        return cls(adj, data.get("basepoint"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return (
            f"CoreGraph(vertices={self.vertex_count}, edges={self.edge_count}, "
            f"rank={self.rank}, basepoint={self.basepoint})"
        )


def fold(generators: Iterable[Word]) -> CoreGraph:
    """Fold the bouquet of generator loops into the basepointed core graph."""
    adj: list[dict[int, int]] = [{}]
    pending: list[tuple[int, int]] = []

    def add_dart(u: int, label: int, v: int) -> None:
        cur = adj[u].get(label)
        if cur is None:
            adj[u][label] = v
        elif cur != v:
            pending.append((cur, v))

    for w in generators:
        cur = 0
        n = len(w.letters)
        for i, letter in enumerate(w.letters):
            nxt = 0 if i == n - 1 else len(adj)
            if nxt == len(adj):
                adj.append({})
            add_dart(cur, letter, nxt)
            add_dart(nxt, -letter, cur)
            cur = nxt

    parent = list(range(len(adj)))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    while pending:
        a, b = pending.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if len(adj[ra]) < len(adj[rb]):
            ra, rb = rb, ra
        parent[rb] = ra
        absorbed = adj[rb]
        adj[rb] = {}
        for label, target in absorbed.items():
            target = find(target)
            cur = adj[ra].get(label)
            if cur is None:
                adj[ra][label] = target
            else:
                cur = find(cur)
                adj[ra][label] = cur
                if cur != target:
                    pending.append((cur, target))

    alive = {v for v in range(len(adj)) if find(v) == v}
    # refresh stale targets before compacting
    for v in alive:
        adj[v] = {label: find(t) for label, t in adj[v].items()}
    base = find(0)
    compact_adj = [adj[v] for v in sorted(alive)]
    mapping = {v: i for i, v in enumerate(sorted(alive))}
    compact_adj = [
        {label: mapping[t] for label, t in d.items()} for d in compact_adj
    ]
    base = mapping[base]

    alive2, mapping2 = _trim(compact_adj, basepoint=base)
    return _compact(compact_adj, alive2, mapping2, basepoint=base)


def _trim(
    adj: list[dict[int, int]], basepoint: int | None
) -> tuple[set[int], dict[int, int]]:
    """Iteratively delete degree <= 1 vertices (keeping the basepoint)."""
    alive = set(range(len(adj)))
    stack = [v for v in alive if len(adj[v]) <= 1 and v != basepoint]
    while stack:
        v = stack.pop()
        if v not in alive or len(adj[v]) > 1 or v == basepoint:
            continue
        alive.discard(v)
        for label, t in list(adj[v].items()):
            if t in alive:
                del adj[t][-label]
                if len(adj[t]) <= 1 and t != basepoint:
                    stack.append(t)
        adj[v] = {}
    mapping = {v: i for i, v in enumerate(sorted(alive))}
    return alive, mapping


def _compact(
    adj: list[dict[int, int]],
    alive: set[int],
    mapping: dict[int, int],
    basepoint: int | None,
) -> CoreGraph:
    if not alive:
        return CoreGraph([{}], 0 if basepoint is not None else None)
    out = [
        {label: mapping[t] for label, t in adj[v].items()}
        for v in sorted(alive)
    ]
    base = mapping[basepoint] if basepoint is not None and basepoint in mapping else None
    if basepoint is not None and base is None:
        raise AssertionError("basepoint trimmed from basepointed graph")
    return CoreGraph(out, base)


def _immerses(source: CoreGraph, target: CoreGraph) -> bool:
    """Is there a label-preserving graph morphism source -> target?

    Both graphs are folded, so the morphism is forced once one vertex
    image is chosen; try every image for vertex 0.
    """
    if source.edge_count == 0:
        return target.vertex_count > 0
    for start in range(target.vertex_count):
        mapping = {0: start}
        stack = [0]
        ok = True
        while stack and ok:
            v = stack.pop()
            for label, head in source.darts(v).items():
                image = target.darts(mapping[v]).get(label)
                if image is None:
                    ok = False
                    break
                if head in mapping:
                    if mapping[head] != image:
                        ok = False
                        break
                else:
                    mapping[head] = image
                    stack.append(head)
        if ok:
            return True
    return False


def is_conjugate_into(h: Sequence[Word], x: Sequence[Word]) -> bool:
    """True iff <h> lies in some conjugate of <x>.

    Both subgroups are replaced by their cyclic cores; conjugate inclusion
    is equivalent to a label-preserving immersion between them.
    """
    core_h = fold(h).cyclic_core()
    if core_h.edge_count == 0:
        return True
    core_x = fold(x).cyclic_core()
    if core_x.edge_count == 0:
        return False
    return _immerses(core_h, core_x)


def generates_free_group(words: Sequence[Word], rank: int) -> bool:
    """True iff the words generate all of F_rank (folded graph is the rose)."""
    graph = fold(words)
    if graph.vertex_count != 1:
        return False
    labels = {abs(label) for label in graph.darts(0)}
    return labels == set(range(1, rank + 1)) and graph.edge_count == rank


@dataclass(frozen=True)
class NielsenMove:
    """Elementary Nielsen move on a tuple.

    kind "mul": entry i is replaced by the product with entry j (j is kept):
    side "R" means u_i <- u_i * u_j^sign, side "L" means u_i <- u_j^sign * u_i.
    kinds "swap" and "invert" are included for completeness.
    """

    kind: str
    i: int
    j: int = -1
    side: str = "R"
    sign: int = 1

    def apply(self, words: list[tuple[int, ...]]) -> None:
        if self.kind == "mul":
            other = words[self.j] if self.sign > 0 else invert_letters(words[self.j])
            if self.side == "R":
                words[self.i] = concat(words[self.i], other)
            else:
                words[self.i] = concat(other, words[self.i])
        elif self.kind == "swap":
            words[self.i], words[self.j] = words[self.j], words[self.i]
        elif self.kind == "invert":
            words[self.i] = invert_letters(words[self.i])
        else:
            raise ValueError(f"unknown move kind {self.kind}")


NielsenTranscript = tuple[NielsenMove, ...]


def _mul_moves(n: int) -> list[NielsenMove]:
    moves = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for side in ("R", "L"):
                for sign in (1, -1):
                    moves.append(NielsenMove("mul", i, j, side, sign))
    return moves


def _move_delta(words: list[tuple[int, ...]], move: NielsenMove) -> int:
    u = words[move.i]
    v = words[move.j] if move.sign > 0 else invert_letters(words[move.j])
    if move.side == "R":
        return len(v) - 2 * cancellation(u, v)
    return len(v) - 2 * cancellation(v, u)


def _nielsen_descent(words: list[tuple[int, ...]]) -> list[NielsenMove]:
    """Greedy strictly-shortening Nielsen descent with plateau escapes.

    Applies the first length-reducing move repeatedly; when stuck on a
    plateau, breadth-first searches through equal-length tuples for a
    state admitting a strict reduction.  Complete for genuine bases by
    Nielsen reduction (length-non-increasing moves suffice).
    """
    n = len(words)
    moves = _mul_moves(n)
    transcript: list[NielsenMove] = []
    while True:
        progressed = False
        for move in moves:
            if _move_delta(words, move) < 0:
                move.apply(words)
                transcript.append(move)
                progressed = True
                break
        if progressed:
            continue
        if all(len(w) == 1 for w in words):
            return transcript
        path = _plateau_escape(words, moves)
        if path is None:
            raise RuntimeError(
                "Nielsen descent stalled on a certified basis; "
                "plateau search exhausted"
            )
        for move in path:
            move.apply(words)
            transcript.append(move)


_PLATEAU_CAP = 100_000


def _plateau_escape(
    words: list[tuple[int, ...]], moves: list[NielsenMove]
) -> list[NielsenMove] | None:
    start = tuple(words)
    seen = {start}
    frontier: list[tuple[tuple[tuple[int, ...], ...], list[NielsenMove]]] = [
        (start, [])
    ]
    expanded = 0
    while frontier:
        next_frontier = []
        for state, path in frontier:
            state_list = list(state)
            for move in moves:
                delta = _move_delta(state_list, move)
                if delta < 0:
                    return path + [move]
                if delta == 0:
                    move.apply(state_list)
                    new_state = tuple(state_list)
                    state_list = list(state)
                    if new_state not in seen:
                        seen.add(new_state)
                        next_frontier.append((new_state, path + [move]))
            expanded += 1
            if expanded > _PLATEAU_CAP:
                return None
        frontier = next_frontier
    return None


def is_basis(
    words: Sequence[Word], rank: int
) -> tuple[bool, NielsenTranscript | None]:
    """Decide whether an n-tuple is a basis of F_n, with a Nielsen transcript.

    Basis-ness itself is settled by folding; the transcript (which carries
    the tuple to the standard basis up to signed permutation) is computed
    only for genuine bases and is what rewrite_in_basis inverts.
    """
    words = tuple(words)
    if len(words) != rank:
        raise ValueError(f"expected {rank} words, got {len(words)}")
    if not generates_free_group(words, rank):
        return False, None
    letter_tuples = [w.letters for w in words]
    transcript = _nielsen_descent(letter_tuples)
    return True, tuple(transcript)


def substitute(expr: Iterable[int], values: Sequence[Word]) -> Word:
    """Substitute values[i-1] for letter i in expr and freely reduce."""
    out: tuple[int, ...] = ()
    for letter in expr:
        piece = values[abs(letter) - 1].letters
        if letter < 0:
            piece = invert_letters(piece)
        out = concat(out, piece)
    return Word(out)


@lru_cache(maxsize=128)
def _letter_images(basis_letters: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    """Expressions of the standard letters in terms of the given basis.

    Entry i is a word over the basis alphabet (letter j = j-th basis word)
    whose substitution equals standard letter i+1.
    """
    rank = len(basis_letters)
    ok, transcript = is_basis([Word(w) for w in basis_letters], rank)
    if not ok:
        raise ValueError("rewrite_in_basis requires a basis")
    real = list(basis_letters)
    formal: list[tuple[int, ...]] = [(i + 1,) for i in range(rank)]
    for move in transcript:
        move.apply(real)
        move.apply(formal)
    images: list[tuple[int, ...]] = [()] * rank
    for i, final in enumerate(real):
        letter = final[0]
        expr = formal[i] if letter > 0 else invert_letters(formal[i])
        images[abs(letter) - 1] = expr
    return tuple(images)


def rewrite_in_basis(w: Word, basis: Sequence[Word]) -> Word:
    """Rewrite w as a word over a new basis (letter i = i-th basis word).

    Substituting the basis words back into the result and reducing returns
    w exactly.
    """
    images = _letter_images(tuple(word.letters for word in basis))
    out: tuple[int, ...] = ()
    for letter in w.letters:
        piece = images[abs(letter) - 1]
        if letter < 0:
            piece = invert_letters(piece)
        out = concat(out, piece)
    return Word(out)


def minimize_tuple(
    words: Sequence[Word], rank: int
) -> tuple[tuple[CyclicWord, ...], tuple[WhiteheadAutomorphism, ...]]:
    """Minimize the total cyclic length of a tuple under Whitehead moves.

    The same automorphism is applied to every entry; the first strictly
    improving move (in the fixed enumeration order) is taken each round.
    """
    current = [CyclicWord.from_word(w) for w in words]
    total = sum(len(c) for c in current)
    moves = tuple(type_ii_moves(rank))
    transcript: list[WhiteheadAutomorphism] = []
    improved = True
    while improved and total:
        improved = False
        for move in moves:
            images = [apply_cyclic(move, c) for c in current]
            new_total = sum(len(c) for c in images)
            if new_total < total:
                current, total = images, new_total
                transcript.append(move)
                improved = True
                break
    return tuple(current), tuple(transcript)


def _whitehead_core_descent(
    words: tuple[Word, ...], rank: int
) -> tuple[tuple[Word, ...], CoreGraph, tuple[WhiteheadAutomorphism, ...]]:
    """Greedy Whitehead descent on the edge count of the cyclic core graph.

    By Gersten's peak reduction for subgroups, the descent reaches the
    minimal core size over the automorphism orbit of the conjugacy class.
    """
    current = words
    core = fold(current).cyclic_core()
    moves = tuple(type_ii_moves(rank))
    transcript: list[WhiteheadAutomorphism] = []
    improved = True
    while improved:
        improved = False
        for move in moves:
            candidate = tuple(apply_automorphism(move, w) for w in current)
            cand_core = fold(candidate).cyclic_core()
            if cand_core.edge_count < core.edge_count:
                current, core = candidate, cand_core
                transcript.append(move)
                improved = True
                break
    return current, core, tuple(transcript)


def is_free_factor(words: Sequence[Word], rank: int) -> bool:
    """True iff <words> is conjugate to a free factor of F_rank.

    The cyclic core graph is Whitehead-minimized; the subgroup is a free
    factor exactly when the minimum is a rose (whose distinct petal
    letters then span a conjugate of the subgroup).
    """
    words = tuple(words)
    if not words or all(not w for w in words):
        return False
    if any(w.max_index() > rank for w in words):
        raise ValueError("tuple letters exceed the given rank")
    _, core, _ = _whitehead_core_descent(words, rank)
    return core.vertex_count == 1 and core.edge_count >= 1


def free_factor_complement(words: Sequence[Word], rank: int) -> tuple[Word, ...]:
    """A basis of a complementary free factor, at the conjugacy-class level.

    The letters missing from the minimal rose are pulled back through the
    inverse of the minimizing transcript.  Raises NotFreeFactorError when
    the tuple is not (conjugate to) a free factor.
    """
    words = tuple(words)
    _, core, transcript = _whitehead_core_descent(words, rank)
    if core.vertex_count != 1 or core.edge_count == 0:
        raise NotFreeFactorError(f"{[str(w) for w in words]} is not a free factor")
    used = {abs(label) for label in core.darts(0)}
    complement = []
    for index in range(1, rank + 1):
        if index in used:
            continue
        w = Word((index,))
        for aut in reversed(transcript):
            w = apply_automorphism(inverse_automorphism(aut), w)
        complement.append(w)
    return tuple(complement)
