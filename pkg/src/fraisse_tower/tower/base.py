"""Level 1: finite pieces of the rationals with every point named.

Members are finite sets of rationals.  Each point lies in ``U[1]``, carries
exactly one colour ``Q[q]`` naming its rational, and ``<[1]`` is the order
of the rationals.  Member ``i`` lists the set coded by ``i`` in increasing
order on the universe ``0..k-1``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import floor
from typing import Iterable, Iterator, Optional

from ..age import AgeRep, _fresh
from ..codec import decode_rational, decode_rational_set, encode_rational, encode_rational_set
from ..errors import AmalgamFailed
from ..notations import ONE
from ..structures import FinStructure, PartialMap, Symbol, SymbolFamily, Vocabulary
from .level import TowerLevel

U1 = "U[1]"
LT1 = "<[1]"


def q_name(q: Fraction) -> str:
    return f"Q[{Fraction(q)}]"


def _parse_q(name: str) -> Optional[Symbol]:
    if not (name.startswith("Q[") and name.endswith("]")):
        return None
    body = name[2:-1]
    try:
        q = Fraction(body)
    except (ValueError, ZeroDivisionError):
        return None
    return Symbol(name, 1, ONE) if str(q) == body else None


def _enumerate_q() -> Iterator[Symbol]:
    for n in itertools.count():
        q = decode_rational(n)
        if encode_rational(q) == n:
            yield Symbol(q_name(q), 1, ONE)


BASE_VOCAB = Vocabulary("tau[1]", [Symbol(U1, 1, ONE), Symbol(LT1, 2, ONE)],
                        families=[SymbolFamily(_parse_q, _enumerate_q)])


def rational_structure(qs: Iterable[Fraction], elements: Optional[Iterable[int]] = None) -> FinStructure:
    """The structure on ``elements`` whose k-th element carries the k-th rational of ``qs``."""
    qs = [Fraction(q) for q in qs]
    elems = list(range(len(qs))) if elements is None else list(elements)
    rel = {U1: [(x,) for x in elems], LT1: []}
    for x, q in zip(elems, qs):
        rel.setdefault(q_name(q), []).append((x,))
    level = {q: k for k, q in enumerate(sorted(set(qs)))}
    ranked = sorted((level[q], x) for q, x in zip(qs, elems))
    for k, (q, x) in enumerate(ranked):
        rel[LT1].extend((x, y) for r, y in ranked[k + 1:] if q < r)
    return FinStructure(BASE_VOCAB, elems, rel, check=False)


def rationals_of(S: FinStructure) -> dict[int, Fraction]:
    """Point -> rational for every ``Q``-coloured point of ``S``."""
    out = {}
    for name in S.realized():
        if name.startswith("Q["):
            q = Fraction(name[2:-1])
            for (x,) in S.relation(name):
                out[x] = q
    return out


def base_member(i: int) -> FinStructure:
    return rational_structure(decode_rational_set(i))


def base_locate(S: FinStructure) -> tuple[int, PartialMap]:
    qs = rationals_of(S)
    order = sorted(qs, key=qs.get)
    return encode_rational_set(qs.values()), PartialMap(enumerate(order))


def base_decide(i: int, j: int, f: PartialMap) -> bool:
    qi, qj = decode_rational_set(i), decode_rational_set(j)
    if f.domain != frozenset(range(len(qi))):
        return False
    return all(0 <= f(k) < len(qj) and qj[f(k)] == q for k, q in enumerate(qi))


def base_amalgam(A: FinStructure, B: FinStructure, p: PartialMap, complete: bool = False):
    """Union of the two rational sets; points with the same rational are identified."""
    qa, qb = rationals_of(A), rationals_of(B)
    for b, a in p.pairs:
        if qb.get(b) != qa.get(a):
            raise AmalgamFailed(f"common point {b}->{a} changes its rational")
    where = {q: a for a, q in qa.items()}
    newq = sorted({q for q in qb.values() if q not in where})
    for q, x in zip(newq, _fresh(set(A.universe), len(newq))):
        where[q] = x
    fb = PartialMap((b, where[q]) for b, q in qb.items())
    items = sorted(where.items())
    D = rational_structure([q for q, _ in items], [x for _, x in items])
    return D, PartialMap.identity(A.universe), fb


def _gap_rationals(qs: list[Fraction]) -> list[Fraction]:
    if not qs:
        return [Fraction(0)]
    out = [Fraction(floor(qs[0]) - 1)]
    out += [(a + b) / 2 for a, b in zip(qs, qs[1:])]
    out.append(Fraction(floor(qs[-1]) + 1))
    return out


def base_extensions(S: FinStructure) -> list:
    qs = rationals_of(S)
    x = max(S.universe, default=-1) + 1
    out = []
    for q in _gap_rationals(sorted(qs.values())):
        items = sorted([*qs.items(), (x, q)], key=lambda t: t[1])
        B = rational_structure([q for _, q in items], [y for y, _ in items])
        out.append((B, x))
    return out


def base_insert_u(S: FinStructure, after: Optional[int]) -> tuple[FinStructure, int]:
    qs = rationals_of(S)
    ordered = sorted(qs.values())
    if after is None:
        q = Fraction(floor(ordered[0]) - 1) if ordered else Fraction(0)
    else:
        lo = qs[after]
        above = [r for r in ordered if r > lo]
        q = (lo + above[0]) / 2 if above else Fraction(floor(lo) + 1)
    x = max(S.universe, default=-1) + 1
    rel = {U1: [(x,)], q_name(q): [(x,)],
           LT1: [(y, x) for y, r in qs.items() if r < q] + [(x, y) for y, r in qs.items() if r > q]}
    return S.extended([x], rel), x


def base_validator(S: FinStructure) -> list:
    bad = []
    qs = rationals_of(S)
    for name in S.realized():
        if name not in (U1, LT1) and not name.startswith("Q["):
            bad.append(f"foreign relation {name}")
    colours: dict[int, list] = {}
    for name in S.realized():
        if name.startswith("Q["):
            for (x,) in S.relation(name):
                colours.setdefault(x, []).append(name)
    for x in S.elements:
        if not S.holds(U1, x):
            bad.append(f"{x} not in {U1}")
        if len(colours.get(x, [])) != 1:
            bad.append(f"{x} carries {len(colours.get(x, []))} colours")
    seen: dict[Fraction, int] = {}
    for x, q in qs.items():
        if q in seen:
            bad.append(f"{seen[q]} and {x} both carry {q}")
        seen[q] = x
    expected = {(x, y) for x, y in itertools.permutations(qs, 2) if qs[x] < qs[y]}
    if set(S.relation(LT1)) != expected:
        bad.append(f"{LT1} differs from the order of the rationals")
    return bad


def base_age() -> AgeRep:
    return AgeRep("k1", BASE_VOCAB, base_member, decide_fn=base_decide, locate=base_locate,
                  amalgam=base_amalgam, extensions=base_extensions, validator=base_validator)


def build_base() -> TowerLevel:
    return TowerLevel(ONE, BASE_VOCAB, base_age(), U1, LT1, base_insert_u, base_validator,
                      distinguished={"U": U1, "<": LT1, "Q": "Q[q]"})
