import random

import pytest

from freefactor.whitehead import (
    SignedPermutation,
    WhiteheadMove,
    apply_automorphism,
    apply_cyclic,
    inverse_automorphism,
    is_filling,
    is_primitive,
    minimize,
    type_ii_moves,
    whitehead_graph,
)
from freefactor.words import CyclicWord, Word, conjugate, cyclic_reduce, parse_word


def W(text):
    return parse_word(text)


def test_apply_type_i_swap():
    swap = SignedPermutation((2, 1, 3))
    assert apply_automorphism(swap, W("ab")) == W("ba")
    assert apply_automorphism(swap, Word()) == Word()


def test_apply_type_ii_example():
    # multiplier a, Z = {a, b}: b -> ba
    move = WhiteheadMove(1, frozenset({1, 2}))
    assert apply_automorphism(move, W("b")) == W("ba")
    assert apply_automorphism(move, W("a")) == W("a")
    assert apply_automorphism(move, W("B")) == W("AB")
    assert apply_automorphism(move, Word()) == Word()


def test_malformed_type_ii_rejected():
    with pytest.raises(ValueError):
        WhiteheadMove(1, frozenset({1, -1, 2}))
    with pytest.raises(ValueError):
        WhiteheadMove(1, frozenset({2}))


def test_apply_then_inverse_round_trip():
    rng = random.Random(7)
    moves = list(type_ii_moves(3))
    for _ in range(200):
        raw = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randrange(12))]
        w = Word(tuple(_reduce(raw)))
        aut = rng.choice(moves)
        assert apply_automorphism(inverse_automorphism(aut), apply_automorphism(aut, w)) == w
    perm = SignedPermutation((-3, 1, -2))
    w = W("abcBA")
    assert apply_automorphism(inverse_automorphism(perm), apply_automorphism(perm, w)) == w


def _reduce(raw):
    out = []
    for l in raw:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return out


def test_type_ii_move_count():
    # 2n multipliers, 2^(2n-2) - 1 nonempty subsets each
    assert len(list(type_ii_moves(2))) == 4 * 3
    assert len(list(type_ii_moves(3))) == 6 * 15


def test_minimize_examples():
    minimal, transcript = minimize(W("bcB"), 3)
    assert minimal == CyclicWord((3,))  # cyclic core of bcB is already c
    assert minimal.word == W("c")

    minimal, transcript = minimize(W("b"), 3)
    assert minimal.word == W("b") and transcript == ()

    minimal, _ = minimize(W("bbccdd"), 4)
    assert len(minimal) == 6


def test_minimize_no_move_shortens_bbccdd():
    # independent oracle: every rank-3 type-II image of (relabeled) b^2c^2d^2
    # has cyclic length >= 6
    w = CyclicWord.from_word(W("aabbcc"))
    for move in type_ii_moves(3):
        assert len(apply_cyclic(move, w)) >= 6


def test_minimize_transcript_composes():
    for text, rank in [("bcB", 3), ("abAB", 2), ("aabbcc", 3), ("cabAB", 3)]:
        w = W(text)
        minimal, transcript = minimize(w, rank)
        image = CyclicWord.from_word(w)
        for move in transcript:
            image = apply_cyclic(move, image)
        assert image == minimal


def _orbit_reachable_lengths(w, rank, max_len):
    """BFS over cyclic words of length <= max_len under all Whitehead moves."""
    moves = list(type_ii_moves(rank))
    perms = _signed_permutations(rank)
    start = CyclicWord.from_word(w)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for cur in frontier:
            for aut in moves + perms:
                image = apply_cyclic(aut, cur)
                if len(image) <= max_len and image not in seen:
                    seen.add(image)
                    nxt.append(image)
        frontier = nxt
    return seen


def _signed_permutations(rank):
    import itertools

    perms = []
    for perm in itertools.permutations(range(1, rank + 1)):
        for signs in itertools.product((1, -1), repeat=rank):
            perms.append(SignedPermutation(tuple(p * s for p, s in zip(perm, signs))))
    return perms


def test_is_primitive_examples():
    assert is_primitive(W("b"), 3)
    assert not is_primitive(W("bb"), 3)
    assert is_primitive(W("bcB"), 3)
    with pytest.raises(ValueError):
        is_primitive(Word(), 3)


def test_is_primitive_against_orbit_oracle():
    # all cyclic words of length <= 4 in rank 2 (rank 3 is exercised above;
    # the rank-2 orbit stays small enough to enumerate exhaustively)
    rng = random.Random(3)
    alphabet = [1, -1, 2, -2]
    words = set()
    for _ in range(400):
        raw = [rng.choice(alphabet) for _ in range(rng.randrange(1, 5))]
        out = _reduce(raw)
        if out:
            w = Word(tuple(out))
            if w.is_cyclically_reduced():
                words.add(w)
    for w in sorted(words, key=lambda x: (len(x), x.letters)):
        orbit = _orbit_reachable_lengths(w, 2, max_len=len(w))
        oracle = any(len(v) == 1 for v in orbit)
        assert is_primitive(w, 2) == oracle, str(w)


def _edge_sets(graph):
    return sorted(sorted(e) for e in graph.edges)


def test_whitehead_graph_examples():
    g = whitehead_graph(W("aabbcc"), 3)
    assert _edge_sets(g) == sorted(
        sorted(e) for e in [(-1, 1), (-1, 2), (-2, 2), (-2, 3), (-3, 3), (-3, 1)]
    )
    g = whitehead_graph(W("ab"), 2)
    assert _edge_sets(g) == sorted(sorted(e) for e in [(-1, 2), (-2, 1)])
    g = whitehead_graph(W("b"), 2)
    assert _edge_sets(g) == [[-2, 2]]
    with pytest.raises(ValueError):
        whitehead_graph(Word(), 2)


def test_whitehead_graph_edge_count_matches_cyclic_length():
    for text in ["aabbcc", "abAB", "aab"]:
        w = CyclicWord.from_word(W(text))
        assert len(whitehead_graph(w, 3).edges) == len(w)


def test_is_filling_paper_examples():
    assert is_filling(W("bbccdd"), 3)
    assert is_filling(W("ccbbddcc"), 3)
    assert not is_filling(W("b"), 3)
    assert is_filling(W("bcBC"), 2)


def test_is_filling_more_cases():
    assert is_filling(W("abAB"), 2)
    assert not is_filling(W("ab"), 2)
    assert not is_filling(W("aabb"), 3)  # misses c
    assert is_filling(W("a"), 1)


def test_filling_implies_not_primitive():
    for text, rank in [("bbccdd", 3), ("ccbbddcc", 3), ("abAB", 2), ("bcBC", 2)]:
        assert not is_primitive(W(text), rank)


def test_filling_conjugation_and_inversion_invariant():
    rng = random.Random(11)
    for text, rank in [("aabbcc", 3), ("abAB", 2), ("ab", 2), ("aab", 2)]:
        w = W(text)
        base = is_filling(w, rank)
        assert is_filling(w.inverse(), rank) == base
        for _ in range(5):
            raw = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randrange(4))]
            g = Word(tuple(_reduce(raw)))
            assert is_filling(conjugate(w, g), rank) == base


def test_filling_against_orbit_oracle():
    # a cyclic word lies in a proper free factor iff its orbit (explored
    # through lengths <= |w|, equal-length moves included) reaches a word
    # missing a generator
    rng = random.Random(5)
    alphabet = [1, -1, 2, -2]
    cases = set()
    for _ in range(300):
        raw = [rng.choice(alphabet) for _ in range(rng.randrange(2, 6))]
        out = _reduce(raw)
        if out:
            w = Word(tuple(out))
            if w.is_cyclically_reduced():
                cases.add(w)
    for w in sorted(cases, key=lambda x: (len(x), x.letters)):
        minimal, _ = minimize(w, 2)
        orbit = _orbit_reachable_lengths(minimal.word, 2, max_len=len(minimal))
        in_proper_factor = any(
            len({abs(l) for l in v.representative}) < 2 for v in orbit
        )
        assert is_filling(w, 2) == (not in_proper_factor), str(w)
