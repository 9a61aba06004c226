"""Finite relational structures over lazily enumerated vocabularies.

A :class:`FinStructure` has a finite universe of naturals and interprets
finitely many relation symbols; every other symbol of its (possibly
infinite) vocabulary is empty.  Because of that, embedding checks only ever
need to look at the symbols realized on either side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional

from .errors import BoundExceeded, NotSubset, UnknownSymbol, VocabularyMismatch
from .notations import ONE, Notation

DEFAULT_EMBED_BOUND = 8


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    mark: Notation = ONE

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"relation symbol {self.name!r} needs arity >= 1")


@dataclass(frozen=True)
class SymbolFamily:
    """An infinite, computable set of symbols sharing a naming scheme.

    ``parse`` recognizes a canonical name and materializes its symbol (or
    returns None); ``enumerate`` lists the whole family without repetition.
    """

    parse: Callable[[str], Optional[Symbol]]
    enumerate: Callable[[], Iterator[Symbol]]


class Vocabulary:
    """A computable relational vocabulary.

    Equality is identity: two structures are comparable only when they point
    at the very same vocabulary object.
    """

    def __init__(self, name: str, symbols: Iterable[Symbol] = (),
                 families: Iterable[SymbolFamily] = (),
                 parents: Iterable["Vocabulary"] = ()):
        self.name = name
        self._own = {}
        for sym in symbols:
            if sym.name in self._own:
                raise ValueError(f"duplicate symbol {sym.name!r}")
            self._own[sym.name] = sym
        self._families = tuple(families)
        self._parents = tuple(parents)
        self._cache: dict[str, Symbol] = {}

    def __repr__(self) -> str:
        return f"<Vocabulary {self.name}>"

    @property
    def own_symbols(self) -> list[Symbol]:
        return list(self._own.values())

    @property
    def parents(self) -> tuple["Vocabulary", ...]:
        return self._parents

    @property
    def is_finite(self) -> bool:
        return not self._families and all(p.is_finite for p in self._parents)

    def find(self, name: str) -> Optional[Symbol]:
        sym = self._own.get(name) or self._cache.get(name)
        if sym is not None:
            return sym
        for fam in self._families:
            sym = fam.parse(name)
            if sym is not None:
                self._cache[name] = sym
                return sym
        for parent in self._parents:
            sym = parent.find(name)
            if sym is not None:
                self._cache[name] = sym
                return sym
        return None

    def lookup(self, name: str) -> Symbol:
        sym = self.find(name)
        if sym is None:
            raise UnknownSymbol(f"{name!r} is not a symbol of {self.name}")
        return sym

    def __contains__(self, name: str) -> bool:
        return self.find(name) is not None

    def arity(self, name: str) -> int:
        return self.lookup(name).arity

    def __iter__(self) -> Iterator[Symbol]:
        # Fair interleaving of own symbols, families and parents; names are
        # deduplicated so shared parents do not repeat symbols.
        seen = set()
        sources = [iter(self._own.values())]
        sources += [fam.enumerate() for fam in self._families]
        sources += [iter(p) for p in self._parents]
        while sources:
            alive = []
            for src in sources:
                sym = next(src, None)
                if sym is None:
                    continue
                alive.append(src)
                if sym.name not in seen:
                    seen.add(sym.name)
                    yield sym
            sources = alive

    def finite_symbols(self) -> list[Symbol]:
        """All symbols, when the vocabulary is finite."""
        if not self.is_finite:
            raise BoundExceeded(f"{self.name} is infinite")
        return list(self)


class Literal(NamedTuple):
    symbol: str
    args: tuple
    positive: bool

    def __str__(self) -> str:
        atom = f"{self.symbol}({','.join(map(str, self.args))})"
        return atom if self.positive else "¬" + atom


class FinStructure:
    """A finite structure: universe plus the nonempty relation interpretations."""

    __slots__ = ("vocabulary", "universe", "_rel", "_incidence", "_hash", "_sorted")

    def __init__(self, vocabulary: Vocabulary, universe: Iterable[int] = (),
                 relations: Optional[Mapping[str, Iterable[tuple]]] = None,
                 check: bool = True):
        self.vocabulary = vocabulary
        self.universe = frozenset(universe)
        rel = {}
        for name, tuples in (relations or {}).items():
            ts = tuples if isinstance(tuples, frozenset) else frozenset(map(tuple, tuples))
            if ts:
                rel[name] = ts
        if check:
            for name, ts in rel.items():
                arity = vocabulary.arity(name)
                for t in ts:
                    if len(t) != arity:
                        raise ValueError(f"{name}{t}: expected arity {arity}")
                    for x in t:
                        if x not in self.universe:
                            raise ValueError(f"{name}{t}: {x} not in universe")
            for x in self.universe:
                if not isinstance(x, int) or x < 0:
                    raise ValueError(f"universe elements must be naturals, got {x!r}")
        self._rel = rel
        self._incidence = None
        self._hash = None
        self._sorted = None

    # -- basic access -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.universe)

    @property
    def elements(self) -> list[int]:
        if self._sorted is None:
            self._sorted = sorted(self.universe)
        return self._sorted

    def relation(self, name: str) -> frozenset:
        return self._rel.get(name, frozenset())

    def holds(self, name: str, *args: int) -> bool:
        return args in self._rel.get(name, ())

    @property
    def relations(self) -> dict[str, frozenset]:
        return dict(self._rel)

    def realized(self) -> list[str]:
        return sorted(self._rel)

    def unary(self, name: str) -> frozenset:
        return frozenset(t[0] for t in self._rel.get(name, ()))

    def incident(self, x: int) -> list[tuple[str, tuple]]:
        if self._incidence is None:
            inc: dict[int, list] = {}
            for name, ts in self._rel.items():
                for t in ts:
                    if len(t) == 1:
                        inc.setdefault(t[0], []).append((name, t))
                        continue
                    for y in set(t):
                        inc.setdefault(y, []).append((name, t))
            self._incidence = inc
        return self._incidence.get(x, [])

    def tuples_within(self, elements: Iterable[int]) -> dict[str, set]:
        """Relations restricted to tuples whose entries all lie in ``elements``."""
        s = elements if isinstance(elements, (set, frozenset)) else set(elements)
        out: dict[str, set] = {}
        if 4 * len(s) < len(self.universe):
            for x in s:
                for name, t in self.incident(x):
                    if all(y in s for y in t):
                        out.setdefault(name, set()).add(t)
        else:
            for name, ts in self._rel.items():
                kept = {t for t in ts if s.issuperset(t)}
                if kept:
                    out[name] = kept
        return out

    # -- identity -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinStructure):
            return NotImplemented
        return (self.vocabulary is other.vocabulary and self.universe == other.universe
                and self._rel == other._rel)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((id(self.vocabulary), self.universe,
                               frozenset(self._rel.items())))
        return self._hash

    def __repr__(self) -> str:
        rels = ", ".join(f"{n}:{sorted(ts)}" for n, ts in sorted(self._rel.items()))
        return f"FinStructure({self.vocabulary.name}, {self.elements}, {{{rels}}})"

    # -- derived structures -------------------------------------------------

    def relabel(self, mapping: Mapping[int, int]) -> "FinStructure":
        """Image of the structure under an injective map defined on the universe."""
        if all(mapping[x] == x for x in self.universe):
            return self
        get = mapping.__getitem__
        rel = {name: [tuple(map(get, t)) for t in ts] for name, ts in self._rel.items()}
        return FinStructure(self.vocabulary, (mapping[x] for x in self.universe), rel, check=False)

    def reduct(self, vocabulary: Vocabulary, keep: Callable[[str], bool]) -> "FinStructure":
        rel = {name: ts for name, ts in self._rel.items() if keep(name)}
        return FinStructure(vocabulary, self.universe, rel, check=False)

    def extended(self, elements: Iterable[int] = (),
                 relations: Optional[Mapping[str, Iterable[tuple]]] = None) -> "FinStructure":
        rel = {name: set(ts) for name, ts in self._rel.items()}
        for name, ts in (relations or {}).items():
            rel.setdefault(name, set()).update(tuple(t) for t in ts)
        return FinStructure(self.vocabulary, self.universe | frozenset(elements), rel, check=False)


def empty_structure(vocabulary: Vocabulary) -> FinStructure:
    return FinStructure(vocabulary)


class PartialMap:
    """A finite partial function on the naturals.

    Functionality holds by construction.  Injectivity is the normal case but
    is not enforced, so that embedding checks can reject collapsing maps
    instead of failing to represent them.
    """

    __slots__ = ("_d", "_hash")

    def __init__(self, pairs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        d = {}
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        for x, y in items:
            if x in d and d[x] != y:
                raise ValueError(f"not functional at {x}: {d[x]} and {y}")
            d[x] = y
        self._d = d
        self._hash = None

    @classmethod
    def identity(cls, elements: Iterable[int]) -> "PartialMap":
        return cls((x, x) for x in elements)

    @classmethod
    def parse(cls, text: str) -> "PartialMap":
        """Parse ``"0:3,1:5"``."""
        text = text.strip()
        if not text:
            return cls()
        pairs = []
        for item in text.split(","):
            x, _, y = item.partition(":")
            pairs.append((int(x), int(y)))
        return cls(pairs)

    def __call__(self, x: int) -> int:
        return self._d[x]

    def get(self, x: int, default=None):
        return self._d.get(x, default)

    def __contains__(self, x: int) -> bool:
        return x in self._d

    def __len__(self) -> int:
        return len(self._d)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self._d.items())

    def as_dict(self) -> dict[int, int]:
        return dict(self._d)

    @property
    def domain(self) -> frozenset:
        return frozenset(self._d)

    @property
    def range(self) -> frozenset:
        return frozenset(self._d.values())

    @property
    def is_injective(self) -> bool:
        return len(set(self._d.values())) == len(self._d)

    def compose(self, inner: "PartialMap") -> "PartialMap":
        """``self ∘ inner``, defined where ``inner`` lands in ``dom(self)``."""
        return PartialMap((x, self._d[y]) for x, y in inner._d.items() if y in self._d)

    def inverse(self) -> "PartialMap":
        if not self.is_injective:
            raise ValueError("cannot invert a non-injective map")
        return PartialMap((y, x) for x, y in self._d.items())

    def restrict(self, elements: Iterable[int]) -> "PartialMap":
        s = set(elements)
        return PartialMap((x, y) for x, y in self._d.items() if x in s)

    def extend(self, x: int, y: int) -> "PartialMap":
        d = dict(self._d)
        if x in d and d[x] != y:
            raise ValueError(f"{x} already maps to {d[x]}")
        d[x] = y
        return PartialMap(d)

    def union(self, other: "PartialMap") -> "PartialMap":
        return PartialMap(list(self._d.items()) + list(other._d.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialMap):
            return NotImplemented
        return self._d == other._d

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __repr__(self) -> str:
        return "PartialMap({" + ", ".join(f"{x}: {y}" for x, y in self.pairs) + "})"

    def __str__(self) -> str:
        return ",".join(f"{x}:{y}" for x, y in self.pairs)


def _same_vocabulary(A: FinStructure, B: FinStructure) -> None:
    if A.vocabulary is not B.vocabulary:
        raise VocabularyMismatch(f"{A.vocabulary.name} vs {B.vocabulary.name}")


def is_embedding(f: PartialMap, A: FinStructure, B: FinStructure) -> bool:
    """Whether ``f`` embeds ``A`` into ``B`` (injective, relations reflected both ways)."""
    _same_vocabulary(A, B)
    if f.domain != A.universe:
        return False
    ran = f.range
    if not ran <= B.universe or not f.is_injective:
        return False
    image = {}
    for name, ts in A.relations.items():
        image[name] = {tuple(f(x) for x in t) for t in ts}
    return image == B.tuples_within(ran)


def is_isomorphism(f: PartialMap, A: FinStructure, B: FinStructure) -> bool:
    return len(A) == len(B) and is_embedding(f, A, B)


def _consistent(A: FinStructure, B: FinStructure, assign: dict, used: dict, x: int, y: int) -> bool:
    # assign already contains x -> y, used contains y -> x
    for name, t in A.incident(x):
        if all(z in assign for z in t):
            if tuple(assign[z] for z in t) not in B.relation(name):
                return False
    for name, u in B.incident(y):
        if all(w in used for w in u):
            if tuple(used[w] for w in u) not in A.relation(name):
                return False
    return True


class SearchLimit(Exception):
    """Raised by :func:`iter_embeddings` when its node budget runs out."""


def iter_embeddings(A: FinStructure, B: FinStructure,
                    fixed: Optional[PartialMap] = None,
                    candidates: Optional[Mapping[int, Iterable[int]]] = None,
                    limit: Optional[int] = None) -> Iterator[PartialMap]:
    """Backtracking search for embeddings ``A -> B`` in lexicographic order.

    ``fixed`` pins part of the map in advance; ``candidates`` optionally
    narrows the admissible targets per source element.  With ``limit`` the
    search raises :class:`SearchLimit` after that many tentative assignments.
    """
    _same_vocabulary(A, B)
    assign: dict[int, int] = {}
    used: dict[int, int] = {}
    if fixed is not None:
        for x, y in fixed.pairs:
            if x not in A.universe or y not in B.universe or y in used:
                return
            assign[x] = y
            used[y] = x
        for x, y in fixed.pairs:
            if not _consistent(A, B, assign, used, x, y):
                return
    order = [x for x in A.elements if x not in assign]
    pools = []
    for x in order:
        pool = None
        for name, t in A.incident(x):
            if len(t) == 1:
                members = B.unary(name)
                pool = members if pool is None else pool & members
        if candidates is not None and x in candidates:
            cand = frozenset(candidates[x])
            pool = cand if pool is None else pool & cand
        pools.append(sorted(pool) if pool is not None else B.elements)

    tries = 0

    def rec(k: int) -> Iterator[PartialMap]:
        nonlocal tries
        if k == len(order):
            yield PartialMap(assign)
            return
        x = order[k]
        for y in pools[k]:
            if y in used:
                continue
            if limit is not None:
                tries += 1
                if tries > limit:
                    raise SearchLimit(limit)
            assign[x] = y
            used[y] = x
            if _consistent(A, B, assign, used, x, y):
                yield from rec(k + 1)
            del assign[x]
            del used[y]

    yield from rec(0)


def find_embedding(A: FinStructure, B: FinStructure,
                   fixed: Optional[PartialMap] = None,
                   candidates: Optional[Mapping[int, Iterable[int]]] = None,
                   limit: Optional[int] = None) -> Optional[PartialMap]:
    """First embedding in lexicographic order, or None.

    When ``limit`` is exhausted the answer is None as well, so callers using a
    limit must treat None as "not found cheaply" rather than "absent".
    """
    try:
        return next(iter_embeddings(A, B, fixed, candidates, limit), None)
    except SearchLimit:
        return None


def enumerate_embeddings(A: FinStructure, B: FinStructure,
                         bound: int = DEFAULT_EMBED_BOUND) -> list[PartialMap]:
    """Every embedding of ``A`` into ``B``, ordered lexicographically by pair list."""
    if len(A) > bound:
        raise BoundExceeded(f"|A| = {len(A)} exceeds the enumeration bound {bound}")
    return list(iter_embeddings(A, B))


def find_isomorphism(A: FinStructure, B: FinStructure) -> Optional[PartialMap]:
    if len(A) != len(B):
        return None
    return find_embedding(A, B)


def isomorphic(A: FinStructure, B: FinStructure) -> bool:
    return find_isomorphism(A, B) is not None


def substructure(A: FinStructure, S: Iterable[int]) -> FinStructure:
    s = frozenset(S)
    if not s <= A.universe:
        raise NotSubset(f"{sorted(s - A.universe)} not in the universe")
    if s == A.universe:
        return A
    return FinStructure(A.vocabulary, s, A.tuples_within(s), check=False)


def atomic_diagram(A: FinStructure) -> list[Literal]:
    """Every realized atomic fact and its negation, in a fixed order."""
    out = []
    elems = A.elements
    for name in A.realized():
        rel = A.relation(name)
        arity = A.vocabulary.arity(name)
        for t in itertools.product(elems, repeat=arity):
            out.append(Literal(name, t, t in rel))
    return out
