"""Computable representations of ages.

An :class:`AgeRep` bundles a total member enumerator ``i -> C_i`` with a
total decision procedure for the embedding relation ``E(K)``.  Optional
hooks make large constructions tractable:

``locate``
    structure -> (index, isomorphism from ``member(index)`` onto it)
``amalgam``
    constructive amalgamation of two structures over a common part
``extensions``
    finitely many one-point extension types over a given structure
``validator``
    membership test for the age, returning a list of violations

Without hooks everything falls back to brute-force search over indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterator, Optional

from .errors import AmalgamFailed, BudgetExhausted, PreconditionFailed
from .structures import (FinStructure, PartialMap, Vocabulary, Symbol, enumerate_embeddings,
                         find_isomorphism, is_embedding, iter_embeddings, substructure)

DEFAULT_AMALGAM_BUDGET = 200

Locate = Callable[[FinStructure], "tuple[int, PartialMap]"]
Amalgam = Callable[[FinStructure, FinStructure, PartialMap, bool],
                   "tuple[FinStructure, PartialMap, PartialMap]"]


@dataclass(eq=False)
class AgeRep:
    tag: str
    vocabulary: Vocabulary
    member_fn: Callable[[int], FinStructure]
    decide_fn: Optional[Callable[[int, int, PartialMap], bool]] = None
    locate: Optional[Locate] = None
    amalgam: Optional[Amalgam] = None
    extensions: Optional[Callable[[FinStructure], list]] = None
    validator: Optional[Callable[[FinStructure], list]] = None
    empty_index: int = 0
    cache_size: int = 4096

    def __post_init__(self):
        self._member = lru_cache(maxsize=self.cache_size)(self.member_fn)

    def member(self, i: int) -> FinStructure:
        return self._member(i)

    def decide_embedding(self, i: int, j: int, f: PartialMap) -> bool:
        if self.decide_fn is not None:
            return self.decide_fn(i, j, f)
        return is_embedding(f, self.member(i), self.member(j))

    def violations(self, S: FinStructure) -> list:
        return [] if self.validator is None else list(self.validator(S))

    def index_of(self, S: FinStructure, horizon: int = 256) -> tuple[int, PartialMap]:
        """An index ``i`` with an isomorphism ``member(i) -> S``.

        Uses the ``locate`` hook when present (its answer is checked) and
        otherwise searches indices up to ``horizon``.
        """
        if self.locate is not None:
            i, h = self.locate(S)
            if is_embedding(h, self.member(i), S) and len(self.member(i)) == len(S):
                return i, h
        for i in range(horizon + 1):
            M = self.member(i)
            if len(M) == len(S):
                h = find_isomorphism(M, S)
                if h is not None:
                    return i, h
        raise BudgetExhausted(f"no member of {self.tag} isomorphic to the structure "
                              f"within {horizon} indices")

    def __repr__(self) -> str:
        return f"<AgeRep {self.tag}>"


@dataclass(frozen=True)
class AmalgamCertificate:
    index: int
    D: FinStructure
    f_prime: PartialMap
    g_prime: PartialMap

    def validate(self, K: AgeRep, A: int, B: int, C: int, f: PartialMap, g: PartialMap) -> bool:
        if self.D != K.member(self.index):
            return False
        if not (is_embedding(self.f_prime, K.member(A), self.D)
                and is_embedding(self.g_prime, K.member(B), self.D)):
            return False
        return all(self.f_prime(f(c)) == self.g_prime(g(c)) for c in K.member(C).universe)


def _via_hook(K: AgeRep, A: int, B: int, C: int, f: PartialMap, g: PartialMap):
    MA, MB = K.member(A), K.member(B)
    p = f.compose(g.inverse())  # common part, B side -> A side
    D, fa, fb = K.amalgam(MA, MB, p, False)
    d, h = K.index_of(D)
    hinv = h.inverse()
    cert = AmalgamCertificate(d, K.member(d), hinv.compose(fa), hinv.compose(fb))
    return cert if cert.validate(K, A, B, C, f, g) else None


def search_amalgam(K: AgeRep, A: int, B: int, C: int, f: PartialMap, g: PartialMap,
                   budget: int = DEFAULT_AMALGAM_BUDGET, use_hook: bool = True) -> AmalgamCertificate:
    """Find ``D = member(d)`` with embeddings ``f', g'`` such that ``f'∘f = g'∘g``.

    The constructive hook is tried first when the age has one.  The fallback
    dovetails indices ``d <= budget`` and, for each, embedding pairs in
    lexicographic order; amalgams that are disjoint outside the common part
    are preferred over ones that identify extra points.
    """
    if not K.decide_embedding(C, A, f):
        raise PreconditionFailed(f"f does not embed member {C} into member {A}")
    if not K.decide_embedding(C, B, g):
        raise PreconditionFailed(f"g does not embed member {C} into member {B}")
    if use_hook and K.amalgam is not None:
        try:
            cert = _via_hook(K, A, B, C, f, g)
        except (AmalgamFailed, BudgetExhausted):
            cert = None
        if cert is not None:
            return cert
    MA, MB, MC = K.member(A), K.member(B), K.member(C)
    common = [(g(c), f(c)) for c in MC.elements]
    for disjoint in (True, False):
        for d in range(budget + 1):
            D = K.member(d)
            if len(D) < max(len(MA), len(MB)):
                continue
            if disjoint and len(D) < len(MA) + len(MB) - len(MC):
                continue
            for fp in iter_embeddings(MA, D):
                fixed = PartialMap((b, fp(a)) for b, a in common)
                cands = None
                if disjoint:
                    free = sorted(D.universe - fp.range)
                    cands = {b: free for b in MB.universe if b not in fixed}
                gp = next(iter_embeddings(MB, D, fixed=fixed, candidates=cands), None)
                if gp is not None:
                    return AmalgamCertificate(d, D, fp, gp)
    raise BudgetExhausted(f"no amalgam for ({A}, {B}) over {C} among indices <= {budget}")


@dataclass
class AxiomReport:
    age: str
    size_bound: int
    index_bound: int
    hp: list = field(default_factory=list)
    jep: list = field(default_factory=list)
    ap: list = field(default_factory=list)
    checked: dict = field(default_factory=lambda: {"hp": 0, "jep": 0, "ap": 0})
    certificates: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.hp or self.jep or self.ap)

    def lines(self) -> Iterator[dict]:
        for kind in ("hp", "jep", "ap"):
            bad = getattr(self, kind)
            yield {"age": self.age, "axiom": kind.upper(), "checked": self.checked[kind],
                   "counterexamples": bad if bad else "none found"}


def _sample(K: AgeRep, size_bound: int, index_bound: int) -> list[int]:
    """Indices within bounds, one per isomorphism type (the first occurrence)."""
    reps: list[int] = []
    for i in range(index_bound + 1):
        M = K.member(i)
        if len(M) > size_bound:
            continue
        if any(len(K.member(j)) == len(M) and find_isomorphism(K.member(j), M) is not None
               for j in reps):
            continue
        reps.append(i)
    return reps


def check_age_axioms(K: AgeRep, size_bound: int, index_bound: int,
                     hp_horizon: Optional[int] = None,
                     budget: int = DEFAULT_AMALGAM_BUDGET,
                     collect: bool = False) -> AxiomReport:
    """Bounded verification of HP, JEP and AP.

    HP: every proper substructure of a sampled member must be isomorphic to
    some member with index ``<= hp_horizon`` (default ``4*index_bound + 16``).
    JEP/AP: every triple of sampled members, with every pair of embeddings of
    the base, must admit an amalgam within ``budget``.  Members are sampled
    up to isomorphism, which loses nothing since the axioms are invariant.
    """
    if hp_horizon is None:
        hp_horizon = 4 * index_bound + 16
    report = AxiomReport(K.tag, size_bound, index_bound)
    reps = _sample(K, size_bound, index_bound)

    for i in reps:
        M = K.member(i)
        for r in range(len(M)):
            for S in itertools.combinations(M.elements, r):
                report.checked["hp"] += 1
                sub = substructure(M, S)
                try:
                    K.index_of(sub, horizon=hp_horizon)
                except BudgetExhausted:
                    report.hp.append({"index": i, "subset": list(S)})

    def attempt(kind: str, A: int, B: int, C: int, f: PartialMap, g: PartialMap) -> None:
        report.checked[kind] += 1
        try:
            cert = search_amalgam(K, A, B, C, f, g, budget)
        except BudgetExhausted:
            getattr(report, kind).append({"A": A, "B": B, "C": C, "f": str(f), "g": str(g)})
            return
        if collect:
            report.certificates.append(((A, B, C, f, g), cert))

    empty = PartialMap()
    base = K.empty_index
    for a, b in itertools.combinations_with_replacement(reps, 2):
        attempt("jep", a, b, base, empty, empty)

    for c in reps:
        MC = K.member(c)
        if len(MC) == 0:
            continue
        for a, b in itertools.combinations_with_replacement(reps, 2):
            MA, MB = K.member(a), K.member(b)
            if len(MA) < len(MC) or len(MB) < len(MC):
                continue
            fs = enumerate_embeddings(MC, MA, bound=max(size_bound, 8))
            gs = enumerate_embeddings(MC, MB, bound=max(size_bound, 8))
            for f in fs:
                for g in gs:
                    attempt("ap", a, b, c, f, g)
    return report


# -- shipped elementary ages ---------------------------------------------------

LO_VOCAB = Vocabulary("linear-orders", [Symbol("<", 2)])
GRAPH_VOCAB = Vocabulary("graphs", [Symbol("E", 2)])


def chain(n: int, elements=None) -> FinStructure:
    elems = list(range(n)) if elements is None else list(elements)
    return FinStructure(LO_VOCAB, elems,
                        {"<": [(a, b) for k, a in enumerate(elems) for b in elems[k + 1:]]},
                        check=False)


def order_of(S: FinStructure, symbol: str, elements=None) -> list[int]:
    """Elements listed increasingly for a strict linear order ``symbol``."""
    elems = S.elements if elements is None else list(elements)
    rel = S.relation(symbol)
    below = {x: 0 for x in elems}
    for a, b in rel:
        if b in below and a in below:
            below[b] += 1
    return sorted(elems, key=lambda x: below[x])


def merge_orders(order_a: list[int], order_b: list[int], p: dict[int, int]) -> tuple[list, dict]:
    """Merge two linear orders over a common part.

    ``p`` maps the common points of ``order_b`` to their twins in
    ``order_a``.  Returns the merged list (using A's names and, for new B
    points, placeholders ``("b", x)``) together with the B-side naming.
    A new B point sits after every A point of its gap between common points.
    """
    common_a = set(p.values())
    gap_of_a = {}
    g = 0
    for x in order_a:
        if x in common_a:
            g += 1
        gap_of_a[x] = g
    keys = {}
    for k, x in enumerate(order_a):
        keys[x] = (gap_of_a[x], 0 if x in common_a else 1, k)
    g = 0
    rank = 0
    for x in order_b:
        if x in p:
            g = gap_of_a[p[x]]
            continue
        keys[("b", x)] = (g, 2, rank)
        rank += 1
    merged = sorted(keys, key=lambda k: keys[k])
    naming = {x: (p[x] if x in p else ("b", x)) for x in order_b}
    return merged, naming


def _fresh(used: set, count: int) -> list[int]:
    out = []
    n = 0
    while len(out) < count:
        if n not in used:
            out.append(n)
        n += 1
    return out


def lo_locate(S: FinStructure) -> tuple[int, PartialMap]:
    order = order_of(S, "<")
    return len(order), PartialMap(enumerate(order))


def lo_amalgam(A: FinStructure, B: FinStructure, p: PartialMap, complete: bool = False):
    merged, naming = merge_orders(order_of(A, "<"), order_of(B, "<"), p.as_dict())
    new = [k for k in merged if isinstance(k, tuple)]
    fresh = dict(zip(new, _fresh(set(A.universe), len(new))))
    final = [fresh.get(k, k) for k in merged]
    D = chain(len(final), final)
    fb = PartialMap((x, fresh.get(v, v)) for x, v in naming.items())
    return D, PartialMap.identity(A.universe), fb


def lo_extensions(S: FinStructure) -> list:
    order = order_of(S, "<")
    x = max(S.universe, default=-1) + 1
    out = []
    for gap in range(len(order) + 1):
        elems = order[:gap] + [x] + order[gap:]
        out.append((chain(len(elems), elems), x))
    return out


def lo_validator(S: FinStructure) -> list:
    bad = []
    rel = S.relation("<")
    for a, b in itertools.permutations(S.elements, 2):
        if ((a, b) in rel) == ((b, a) in rel):
            bad.append(f"{a},{b} not comparable exactly one way")
    for a in S.elements:
        if (a, a) in rel:
            bad.append(f"{a}<{a}")
    for a, b, c in itertools.permutations(S.elements, 3):
        if (a, b) in rel and (b, c) in rel and (a, c) not in rel:
            bad.append(f"transitivity fails at {a},{b},{c}")
    return bad


def linear_orders() -> AgeRep:
    """Finite linear orders; member ``i`` is the chain ``0 < 1 < ... < i-1``."""
    return AgeRep("linorders", LO_VOCAB, chain, locate=lo_locate, amalgam=lo_amalgam,
                  extensions=lo_extensions, validator=lo_validator)


def broken_linear_orders() -> AgeRep:
    """Linear orders with the one-point order left out of the enumeration (fails HP)."""
    return AgeRep("broken-linorders", LO_VOCAB, lambda i: chain(i + 1 if i >= 1 else 0))


# graphs: member index = offset(n) + edge mask over combinations(range(n), 2)

def _graph_offset(n: int) -> int:
    return sum(2 ** comb(m, 2) for m in range(n))


def graph_member(i: int) -> FinStructure:
    n = 0
    while i >= 2 ** comb(n, 2):
        i -= 2 ** comb(n, 2)
        n += 1
    edges = []
    for k, (a, b) in enumerate(itertools.combinations(range(n), 2)):
        if i >> k & 1:
            edges += [(a, b), (b, a)]
    return FinStructure(GRAPH_VOCAB, range(n), {"E": edges}, check=False)


def graph_locate(S: FinStructure) -> tuple[int, PartialMap]:
    elems = S.elements
    pos = {x: k for k, x in enumerate(elems)}
    n = len(elems)
    mask = 0
    for a, b in S.relation("E"):
        i, j = pos[a], pos[b]
        if i < j:
            # index of pair (i, j) in combinations order
            k = i * n - i * (i + 1) // 2 + (j - i - 1)
            mask |= 1 << k
    return _graph_offset(n) + mask, PartialMap(enumerate(elems))


def graph_amalgam(A: FinStructure, B: FinStructure, p: PartialMap, complete: bool = False):
    newb = [x for x in B.elements if x not in p]
    fresh = dict(zip(newb, _fresh(set(A.universe), len(newb))))
    fb = PartialMap({**p.as_dict(), **fresh})
    edges = set(A.relation("E")) | {(fb(a), fb(b)) for a, b in B.relation("E")}
    D = FinStructure(GRAPH_VOCAB, A.universe | set(fresh.values()), {"E": edges}, check=False)
    return D, PartialMap.identity(A.universe), fb


def graph_extensions(S: FinStructure) -> list:
    x = max(S.universe, default=-1) + 1
    out = []
    elems = S.elements
    for r in range(len(elems) + 1):
        for nbrs in itertools.combinations(elems, r):
            B = S.extended([x], {"E": [(x, y) for y in nbrs] + [(y, x) for y in nbrs]})
            out.append((B, x))
    return out


def graph_validator(S: FinStructure) -> list:
    E = S.relation("E")
    bad = [f"loop at {a}" for a, b in E if a == b]
    bad += [f"asymmetric edge {a},{b}" for a, b in E if (b, a) not in E]
    return bad


def finite_graphs() -> AgeRep:
    """Finite simple graphs, enumerated by size and then by edge mask."""
    return AgeRep("graphs", GRAPH_VOCAB, graph_member, locate=graph_locate,
                  amalgam=graph_amalgam, extensions=graph_extensions, validator=graph_validator)
