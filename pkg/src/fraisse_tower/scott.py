"""Finite Scott expansions.

For a finite structure ``A`` the schema adds a predicate ``P<a>`` for every
tuple ``a`` over ``A`` of length ``1..L+1`` (``L = |A|`` by default) and
collects three kinds of sentences:

``type1``  ``forall x (P<a>(x) -> qftp_a(x))``: the complete quantifier-free
           type of ``a``;
``type2``  every element lies in some ``P<b>`` and every ``P<b>`` is realized;
``type3``  for ``|a| <= L``: if ``P<a>(x)`` then every ``y`` puts ``(x, y)``
           into some ``P<ab>`` and every ``P<ab>`` is realized over ``x``.

A structure ``B`` has an expansion satisfying these sentences iff ``B`` is
isomorphic to ``A``.  Expansions satisfying the sentences are closed under
unions, so there is a greatest one, and it is computed by a single backward
pass over tuple lengths.  :func:`check_expansion` evaluates that pass lazily
from the empty tuple; :func:`expandable_batch` evaluates it for many
candidates at once with numpy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import BoundExceeded, VocabularyMismatch
from .structures import FinStructure, Literal, Symbol, Vocabulary

MAX_BASE = 5
MAX_CANDIDATE = 6


def p_name(tup: Sequence[int]) -> str:
    return "P<" + ",".join(map(str, tup)) + ">"


@dataclass(frozen=True)
class Sentence:
    kind: str  # "type1" | "type2" | "type3"
    tup: tuple
    payload: tuple

    @property
    def shape(self) -> str:
        """Quantifier shape of the sentence."""
        return "Pi1" if self.kind == "type1" else "Pi2"

    def text(self) -> str:
        xs = [f"x{k}" for k in range(len(self.tup))]
        if self.kind == "type1":
            body = " & ".join(str(l) for l in self.payload) or "true"
            return f"forall {','.join(xs)} ({p_name(self.tup)}({','.join(xs)}) -> {body})"
        ext = self.payload
        if self.kind == "type2":
            ors = " | ".join(f"{p_name((b,))}(y)" for b in ext)
            ands = " & ".join(f"exists y {p_name((b,))}(y)" for b in ext)
            return f"(forall y ({ors})) & {ands}"
        head = f"{p_name(self.tup)}({','.join(xs)})"
        ors = " | ".join(f"{p_name(self.tup + (b,))}({','.join(xs + ['y'])})" for b in ext)
        ands = " & ".join(f"exists y {p_name(self.tup + (b,))}({','.join(xs + ['y'])})"
                          for b in ext)
        return f"forall {','.join(xs)} ({head} -> (forall y ({ors})) & {ands})"


def _qf_literals(A: FinStructure, tup: tuple) -> tuple:
    """Complete quantifier-free type of ``tup`` written over variables x0.."""
    k = len(tup)
    lits = []
    for i, j in itertools.combinations(range(k), 2):
        lits.append(Literal("=", (f"x{i}", f"x{j}"), tup[i] == tup[j]))
    for name in A.realized():
        r = A.vocabulary.arity(name)
        for pos in itertools.product(range(k), repeat=r):
            args = tuple(tup[p] for p in pos)
            lits.append(Literal(name, tuple(f"x{p}" for p in pos), A.holds(name, *args)))
    return tuple(lits)


@dataclass
class ExpansionSchema:
    base: FinStructure
    bound: int
    tau_star: Vocabulary = field(repr=False)

    @property
    def elements(self) -> list[int]:
        return self.base.elements

    def tuples(self, k: int) -> Iterator[tuple]:
        return itertools.product(self.elements, repeat=k)

    def sentences(self) -> Iterator[Sentence]:
        A = self.base
        for k in range(1, self.bound + 2):
            for tup in self.tuples(k):
                yield Sentence("type1", tup, _qf_literals(A, tup))
        yield Sentence("type2", (), tuple(self.elements))
        for k in range(1, self.bound + 1):
            for tup in self.tuples(k):
                yield Sentence("type3", tup, tuple(self.elements))


def build_schema(A: FinStructure, tuple_len_bound: Optional[int] = None) -> ExpansionSchema:
    """Schema with predicates for tuples up to ``tuple_len_bound + 1`` (default ``|A|``)."""
    if len(A) > MAX_BASE:
        raise BoundExceeded(f"base structure has {len(A)} > {MAX_BASE} elements")
    if len(A) == 0:
        raise BoundExceeded("base structure must be nonempty")
    L = len(A) if tuple_len_bound is None else tuple_len_bound
    syms = [Symbol(p_name(t), len(t)) for k in range(1, L + 2)
            for t in itertools.product(A.elements, repeat=k)]
    voc = Vocabulary(f"{A.vocabulary.name}*", syms, parents=[A.vocabulary])
    return ExpansionSchema(A, L, voc)


# -- the lazy decision procedure ------------------------------------------------


class _Game:
    """Positions ``(a, c)``: tuple ``a`` over A, tuple ``c`` over B of the same length.

    ``win(a, c)`` holds iff ``c`` lies in ``P<a>`` in the greatest expansion.
    """

    def __init__(self, A: FinStructure, B: FinStructure, bound: int):
        self.A, self.B, self.bound = A, B, bound
        self.names = sorted(set(A.realized()) | set(B.realized()))
        self.arity = {n: A.vocabulary.arity(n) for n in self.names}
        self.memo: dict[tuple, bool] = {}

    def _compatible(self, a: tuple, c: tuple) -> bool:
        # only atoms mentioning the last position are new
        k = len(a) - 1
        for i in range(k):
            if (a[i] == a[k]) != (c[i] == c[k]):
                return False
        for name in self.names:
            r = self.arity[name]
            for pos in itertools.product(range(k + 1), repeat=r):
                if k not in pos:
                    continue
                if self.A.holds(name, *(a[p] for p in pos)) != \
                        self.B.holds(name, *(c[p] for p in pos)):
                    return False
        return True

    def win(self, a: tuple, c: tuple) -> bool:
        key = (a, c)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if a and not self._compatible(a, c):
            self.memo[key] = False
            return False
        ok = True
        if len(a) <= self.bound:
            A_el, B_el = self.A.elements, self.B.elements
            ok = all(any(self.win(a + (b,), c + (y,)) for b in A_el) for y in B_el) and \
                all(any(self.win(a + (b,), c + (y,)) for y in B_el) for b in A_el)
        self.memo[key] = ok
        return ok


@dataclass
class ExpansionResult:
    ok: bool
    expansion: dict  # P-name -> set of tuples over B
    failing: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def check_expansion(schema: ExpansionSchema, B: FinStructure) -> ExpansionResult:
    """Does ``B`` have an expansion satisfying the schema's sentences?

    On success the witness is the part of the greatest expansion the search
    touched, which already satisfies every sentence.
    """
    A = schema.base
    if B.vocabulary is not A.vocabulary:
        raise VocabularyMismatch("candidate and base use different vocabularies")
    if len(B) > MAX_CANDIDATE:
        raise BoundExceeded(f"candidate has {len(B)} > {MAX_CANDIDATE} elements")
    game = _Game(A, B, schema.bound)
    ok = game.win((), ())
    expansion: dict = {}
    if ok:
        for (a, c), v in game.memo.items():
            if v and a:
                expansion.setdefault(p_name(a), set()).add(c)
        return ExpansionResult(True, expansion)
    return ExpansionResult(False, {}, "type2/type3: no expansion survives the back-and-forth pass")


def diagonal_expansion(schema: ExpansionSchema, f: Optional[dict] = None) -> dict:
    """``P<a>`` interpreted as the single tuple ``f(a)`` (identity by default)."""
    f = f or {x: x for x in schema.elements}
    return {p_name(t): {tuple(f[x] for x in t)}
            for k in range(1, schema.bound + 2) for t in schema.tuples(k)}


# -- independent evaluation of the sentences ------------------------------------------


def evaluate(schema: ExpansionSchema, B: FinStructure, expansion: dict) -> list[str]:
    """Sentences of the schema false in ``B`` expanded by ``expansion``."""
    A = schema.base
    names = sorted(set(A.realized()) | set(B.realized()))

    def qf_ok(a: tuple, c: tuple) -> bool:
        for i, j in itertools.combinations(range(len(a)), 2):
            if (a[i] == a[j]) != (c[i] == c[j]):
                return False
        for name in names:
            r = A.vocabulary.arity(name)
            for pos in itertools.product(range(len(a)), repeat=r):
                if A.holds(name, *(a[p] for p in pos)) != B.holds(name, *(c[p] for p in pos)):
                    return False
        return True

    P = {k: set(v) for k, v in expansion.items()}
    failing = []
    for s in schema.sentences():
        if s.kind == "type1":
            if not all(qf_ok(s.tup, c) for c in P.get(p_name(s.tup), ())):
                failing.append(s.text())
        elif s.kind == "type2":
            cover = all(any((y,) in P.get(p_name((b,)), ()) for b in s.payload) for y in B.elements)
            real = all(P.get(p_name((b,))) for b in s.payload)
            if not (cover and real):
                failing.append(s.text())
        else:
            for c in P.get(p_name(s.tup), ()):
                nxt = [P.get(p_name(s.tup + (b,)), set()) for b in s.payload]
                cover = all(any(c + (y,) in Pb for Pb in nxt) for y in B.elements)
                real = all(any(c + (y,) in Pb for y in B.elements) for Pb in nxt)
                if not (cover and real):
                    failing.append(s.text() + f" at {c}")
                    break
    return failing


def back_and_forth_check(schema: ExpansionSchema, B: FinStructure, expansion: dict) -> tuple[bool, str]:
    """Is ``{a -> c : c in P<a>}`` a nonempty back-and-forth family of partial isomorphisms?"""
    A = schema.base
    family = {}
    for name, cs in expansion.items():
        a = tuple(int(x) for x in name[2:-1].split(","))
        for c in cs:
            family.setdefault(a, set()).add(tuple(c))
    if not any(family.values()):
        return False, "family is empty"
    game = _Game(A, B, schema.bound)
    for a, cs in family.items():
        for c in cs:
            if not all(game._compatible(a[:k + 1], c[:k + 1]) for k in range(len(a))):
                return False, f"{a} -> {c} is not a partial isomorphism"
    roots = [((), ())]
    for a, cs in family.items():
        roots += [(a, c) for c in cs if len(a) <= schema.bound]
    for a, c in roots:
        for b in A.elements:
            if not any(c + (y,) in family.get(a + (b,), ()) for y in B.elements):
                return False, f"forth fails at {a}->{c} for {b}"
        for y in B.elements:
            if not any(c + (y,) in family.get(a + (b,), ()) for b in A.elements):
                return False, f"back fails at {a}->{c} for {y}"
    return True, "ok"


# -- batch evaluation -------------------------------------------------------------------


def _codes(unary: np.ndarray, binary: np.ndarray, k: int) -> np.ndarray:
    """Integer code of the quantifier-free type of every k-tuple.

    ``unary`` has shape (N, m, u) and ``binary`` (N, m, m, r); the result has
    shape (N, m**k) with tuples in product order.
    """
    N, m = unary.shape[0], unary.shape[1]
    tuples = list(itertools.product(range(m), repeat=k))
    idx = np.array(tuples, dtype=np.int64).reshape(len(tuples), k)
    bits = []
    for i, j in itertools.combinations(range(k), 2):
        bits.append(np.broadcast_to(idx[:, i] == idx[:, j], (N, len(idx))))
    for i in range(k):
        for s in range(unary.shape[2]):
            bits.append(unary[:, idx[:, i], s])
    for i in range(k):
        for j in range(k):
            for s in range(binary.shape[3]):
                bits.append(binary[:, idx[:, i], idx[:, j], s])
    if len(bits) > 62:
        raise BoundExceeded("too many atoms to pack a type code")
    code = np.zeros((N, len(idx)), dtype=np.int64)
    for b, arr in enumerate(bits):
        code |= arr.astype(np.int64) << b
    return code


def _arrays(S: FinStructure, unary_names, binary_names):
    elems = S.elements
    pos = {x: k for k, x in enumerate(elems)}
    m = len(elems)
    U = np.zeros((1, m, len(unary_names)), dtype=bool)
    R = np.zeros((1, m, m, len(binary_names)), dtype=bool)
    for s, name in enumerate(unary_names):
        for (x,) in S.relation(name):
            U[0, pos[x], s] = True
    for s, name in enumerate(binary_names):
        for x, y in S.relation(name):
            R[0, pos[x], pos[y], s] = True
    return U, R


def _survivors(codes_a: list, codes_b: list, nA: int, m: int, depth: int) -> np.ndarray:
    """Backward pass of the ``depth``-round game for a batch (boolean per candidate)."""
    N = codes_b[depth].shape[0]
    Q = codes_a[depth][None, :, None] == codes_b[depth][:, None, :]
    for k in range(depth - 1, -1, -1):
        Q = Q.reshape(N, nA ** k, nA, m ** k, m)
        forth = Q.any(axis=4).all(axis=2)
        back = Q.any(axis=2).all(axis=3)
        Q = forth & back
        if k:
            Q &= codes_a[k][None, :, None] == codes_b[k][:, None, :]
    return Q.reshape(N)


def expandable_batch(schema: ExpansionSchema, unary: np.ndarray, binary: np.ndarray,
                     unary_names: Sequence[str], binary_names: Sequence[str]) -> np.ndarray:
    """Vectorized :func:`check_expansion` for N candidates of one size.

    Candidates are given as arrays ``unary`` (N, m, u) and ``binary``
    (N, m, m, r) over the named relations; the base may realize only these.
    Shorter games are played first: losing a shorter game loses the full one,
    so only the survivors reach the expensive final round.
    """
    A = schema.base
    if set(A.realized()) - set(unary_names) - set(binary_names):
        raise VocabularyMismatch("base realizes relations outside the batch layout")
    Ua, Ra = _arrays(A, unary_names, binary_names)
    nA, m, N = len(A), unary.shape[1], unary.shape[0]
    depth = schema.bound + 1
    alive = np.arange(N)
    for d in range(1, depth + 1):
        if not len(alive):
            break
        codes_a = [_codes(Ua, Ra, k)[0] for k in range(d + 1)]
        codes_b = [_codes(unary[alive], binary[alive], k) for k in range(d + 1)]
        alive = alive[_survivors(codes_a, codes_b, nA, m, d)]
    out = np.zeros(N, dtype=bool)
    out[alive] = True
    return out
