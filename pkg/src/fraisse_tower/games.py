"""Exhaustive Ehrenfeucht-Fraisse games on finite structures.

Duplicator wins the k-round game on ``A`` and ``B`` iff both structures have
the same rank-k type, where the rank-k type of a tuple is its atomic type
together with the set of rank-(k-1) types of its one-point extensions.
Types are interned as integers shared by both structures.
"""

from __future__ import annotations

import itertools

from .structures import FinStructure, _same_vocabulary


def ef_equivalent(A: FinStructure, B: FinStructure, depth: int) -> bool:
    """Does Duplicator win the ``depth``-round game on ``A`` and ``B``?"""
    _same_vocabulary(A, B)
    names = sorted(set(A.realized()) | set(B.realized()))
    arity = {n: A.vocabulary.arity(n) for n in names}
    intern: dict = {}

    def key(obj) -> int:
        return intern.setdefault(obj, len(intern))

    def profile(S: FinStructure, xs: tuple, x: int) -> tuple:
        # atoms mentioning x over the chosen tuple: equalities, then relations
        k = len(xs)
        ext = xs + (x,)
        out = [x == xi for xi in xs]
        for n in names:
            for pos in itertools.product(range(k + 1), repeat=arity[n]):
                if k in pos:
                    out.append(S.holds(n, *(ext[p] for p in pos)))
        return tuple(out)

    def rank_type(S: FinStructure, xs: tuple, atomic: int, rounds: int) -> int:
        if rounds == 0:
            return atomic
        ext = frozenset(rank_type(S, xs + (x,), key((atomic, profile(S, xs, x))), rounds - 1)
                        for x in S.elements)
        return key((atomic, ext))

    root = key(())
    return rank_type(A, (), root, depth) == rank_type(B, (), root, depth)
