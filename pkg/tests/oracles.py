"""Brute-force reference implementations, written straight from the definitions."""

from __future__ import annotations

import itertools

from fraisse_tower.structures import FinStructure, PartialMap


def embeds(f: dict, A: FinStructure, B: FinStructure) -> bool:
    """Injective on A's universe, into B, and every atom of A true iff its image is."""
    if set(f) != set(A.universe) or len(set(f.values())) != len(f):
        return False
    if not set(f.values()) <= set(B.universe):
        return False
    names = set(A.realized()) | set(B.realized())
    for name in names:
        r = A.vocabulary.arity(name)
        for t in itertools.product(A.elements, repeat=r):
            if A.holds(name, *t) != B.holds(name, *(f[x] for x in t)):
                return False
    return True


def all_embeddings(A: FinStructure, B: FinStructure) -> list[dict]:
    out = []
    for image in itertools.permutations(B.elements, len(A)):
        f = dict(zip(A.elements, image))
        if embeds(f, A, B):
            out.append(f)
    return out


def isomorphic(A: FinStructure, B: FinStructure) -> bool:
    return len(A) == len(B) and bool(all_embeddings(A, B))


def partial_iso(S: FinStructure, f: dict) -> bool:
    """``f`` is an isomorphism between the substructures induced on its domain and range."""
    if len(set(f.values())) != len(f):
        return False
    names = S.realized()
    for name in names:
        r = S.vocabulary.arity(name)
        for t in itertools.product(list(f), repeat=r):
            if S.holds(name, *t) != S.holds(name, *(f[x] for x in t)):
                return False
    return True


def _induced(A: FinStructure, xs) -> FinStructure:
    s = set(xs)
    return FinStructure(A.vocabulary, s, A.tuples_within(s), check=False)


def game_position_ok(A, B, pairs) -> bool:
    """Chosen pairs define a partial isomorphism (repeated picks must repeat consistently)."""
    f: dict = {}
    for x, y in pairs:
        if f.setdefault(x, y) != y:
            return False
    return embeds(f, _induced(A, list(f)), B)


def ef_game(A: FinStructure, B: FinStructure, rounds: int, pairs=()) -> bool:
    if not game_position_ok(A, B, pairs):
        return False
    if rounds == 0:
        return True
    for x in A.elements:
        if not any(ef_game(A, B, rounds - 1, pairs + ((x, y),)) for y in B.elements):
            return False
    for y in B.elements:
        if not any(ef_game(A, B, rounds - 1, pairs + ((x, y),)) for x in A.elements):
            return False
    return True


def star_ok(vertices, colour: dict) -> bool:
    """Every fully coloured triangle has its two least colours equal and the third larger."""
    for a, b, c in itertools.combinations(sorted(vertices), 3):
        es = [frozenset(p) for p in ((a, b), (a, c), (b, c))]
        if all(e in colour for e in es):
            lo, mid, hi = sorted(colour[e] for e in es)
            if not (lo == mid < hi):
                return False
    return True


def star_completable(vertices, colour: dict, values) -> bool:
    """Exhaustive search for a total colouring extending ``colour`` with colours from ``values``."""
    missing = [frozenset(p) for p in itertools.combinations(sorted(vertices), 2)
               if frozenset(p) not in colour]
    if not star_ok(vertices, colour):
        return False

    def rec(k: int, col: dict) -> bool:
        if k == len(missing):
            return True
        for v in values:
            col[missing[k]] = v
            if star_ok(vertices, col) and rec(k + 1, col):
                return True
            del col[missing[k]]
        return False

    return rec(0, dict(colour))


def to_map(f) -> dict:
    return f.as_dict() if isinstance(f, PartialMap) else dict(f)
