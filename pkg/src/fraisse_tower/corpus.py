"""Isomorphism-class representatives of small structures with one unary and one binary relation.

A structure on ``0..n-1`` is packed into an integer: bit ``i`` holds
``U(i)`` and bit ``n + n*i + j`` holds ``R(i, j)``.  The representative of a
class is the least code among its relabellings.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .structures import FinStructure, Symbol, Vocabulary

UR = Vocabulary("UR", [Symbol("U", 1), Symbol("R", 2)])


def _bits(n: int) -> int:
    return n + n * n


def _perm_code(codes: np.ndarray, n: int, perm: tuple) -> np.ndarray:
    out = np.zeros_like(codes)
    for i in range(n):
        out |= ((codes >> i) & 1) << perm[i]
    for i in range(n):
        for j in range(n):
            out |= ((codes >> (n + n * i + j)) & 1) << (n + n * perm[i] + perm[j])
    return out


@lru_cache(maxsize=None)
def iso_codes(n: int) -> np.ndarray:
    """Sorted codes of the class representatives on ``n`` elements."""
    codes = np.arange(1 << _bits(n), dtype=np.int64)
    best = codes.copy()
    for perm in itertools.permutations(range(n)):
        np.minimum(best, _perm_code(codes, n, perm), out=best)
    return np.unique(best)


def arrays(codes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Unary (N, n, 1) and binary (N, n, n, 1) boolean arrays for packed codes."""
    codes = np.asarray(codes, dtype=np.int64)
    U = np.stack([(codes >> i) & 1 for i in range(n)], axis=-1).astype(bool) \
        if n else np.zeros((len(codes), 0), dtype=bool)
    R = np.zeros((len(codes), n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            R[:, i, j] = (codes >> (n + n * i + j)) & 1
    return U.reshape(len(codes), n, 1), R.reshape(len(codes), n, n, 1)


def structure(code: int, n: int) -> FinStructure:
    code = int(code)
    U = [(i,) for i in range(n) if code >> i & 1]
    R = [(i, j) for i in range(n) for j in range(n) if code >> (n + n * i + j) & 1]
    return FinStructure(UR, range(n), {"U": U, "R": R})
