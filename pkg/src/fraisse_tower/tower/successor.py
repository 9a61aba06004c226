"""Successor levels.

A structure of level ``b = s(a)`` has three sorts: vertices ``V``, a copy
``M`` of a level-``a`` structure, and a new ordered set ``U`` with order
``<``.  ``P`` gives a vertex at most one point of ``U``; ``F`` colours a
pair of vertices by at most one point of the lower distinguished set inside
``M``.  Fully coloured triangles obey the star law (see :mod:`.coloring`).

Member ``<i1, i2>`` is lower member ``i1`` (renamed onto ``0..m-1``) with the
extra data decoded from ``i2``: the vertex count, the size of ``U``, then a
stream giving the order on ``U``, the ``P`` values and the ``F`` values.
Stream entries that would break the star law are dropped while decoding, so
every index names a valid structure and every valid structure has an index.
"""

from __future__ import annotations

import itertools
from typing import Optional

from ..age import AgeRep, _fresh, merge_orders, order_of
from ..codec import decode_naturals, encode_naturals, lehmer_decode, pair, unpair
from ..errors import AmalgamFailed, VocabularyMismatch
from ..structures import FinStructure, PartialMap, Symbol, Vocabulary
from .coloring import Fresh, complete_coloring, star_violations
from .level import TowerLevel, tagged
from ..notations import successor

SORTS = ("V", "M", "U")


def _pair(v: int, w: int) -> frozenset:
    return frozenset((v, w))


class Anatomy:
    """The sorts and new relations of a successor-level structure."""

    def __init__(self, level: "SuccessorAge", S: FinStructure):
        n = level.names
        self.V = sorted(S.unary(n["V"]))
        self.M = sorted(S.unary(n["M"]))
        self.U = order_of(S, n["<"], sorted(S.unary(n["U"])))
        self.P = {v: u for v, u in S.relation(n["P"])}
        self.F = {_pair(v, w): c for v, w, c in S.relation(n["F"])}


class SuccessorAge:
    def __init__(self, lower: TowerLevel):
        self.lower = lower
        self.notation = successor(lower.notation)
        b = self.notation
        self.names = {k: tagged(k, b) for k in ("V", "M", "U", "P", "F", "<")}
        arity = {"V": 1, "M": 1, "U": 1, "P": 2, "F": 3, "<": 2}
        self.vocabulary = Vocabulary(f"tau[{b}]",
                                     [Symbol(self.names[k], arity[k], b) for k in arity],
                                     parents=[lower.vocabulary])
        self.new = frozenset(self.names.values())

    # -- helpers --------------------------------------------------------------

    def m_part(self, S: FinStructure, M=None) -> FinStructure:
        M = set(S.unary(self.names["M"])) if M is None else set(M)
        rel = {name: ts for name, ts in S.tuples_within(M).items() if name not in self.new}
        return FinStructure(self.lower.vocabulary, M, rel, check=False)

    def colour_order(self, MS: FinStructure) -> list[int]:
        return order_of(MS, self.lower.lt, sorted(MS.unary(self.lower.u)))

    def assemble(self, MS: FinStructure, V, U_order, P: dict, F: dict) -> FinStructure:
        n = self.names
        rel = {name: set(ts) for name, ts in MS.relations.items()}
        rel[n["M"]] = {(x,) for x in MS.universe}
        rel[n["V"]] = {(v,) for v in V}
        rel[n["U"]] = {(u,) for u in U_order}
        rel[n["P"]] = set(P.items())
        rel[n["F"]] = {t for e, c in F.items() for v, w in [tuple(e)] for t in ((v, w, c), (w, v, c))}
        rel[n["<"]] = {(x, y) for k, x in enumerate(U_order) for y in U_order[k + 1:]}
        universe = set(MS.universe) | set(V) | set(U_order)
        return FinStructure(self.vocabulary, universe, rel, check=False)

    @staticmethod
    def _triangle_ok(a: int, b: int, c: int) -> bool:
        lo, mid, hi = sorted((a, b, c))
        return lo == mid < hi

    # -- enumeration ------------------------------------------------------------

    def member(self, i: int) -> FinStructure:
        i1, i2 = unpair(i)
        raw = self.lower.age.member(i1)
        MS = raw.relabel({x: k for k, x in enumerate(raw.elements)})
        m = len(MS)
        nv, r = unpair(i2)
        nu, r = unpair(r)
        stream = iter(decode_naturals(r))

        def take() -> int:
            return next(stream, 0)

        V = list(range(m, m + nv))
        U = list(range(m + nv, m + nv + nu))
        U_order = [U[k] for k in lehmer_decode(take(), nu)]
        P = {}
        for v in V:
            k = take()
            if k and nu:
                P[v] = U[(k - 1) % nu]
        colours = self.colour_order(MS)
        rank = {c: k for k, c in enumerate(colours)}
        F: dict = {}
        for v, w in itertools.combinations(V, 2):
            k = take()
            if not (k and colours):
                continue
            c = colours[(k - 1) % len(colours)]
            if all(self._triangle_ok(rank[c], rank[F[_pair(v, z)]], rank[F[_pair(w, z)]])
                   for z in V if _pair(v, z) in F and _pair(w, z) in F):
                F[_pair(v, w)] = c
        return self.assemble(MS, V, U_order, P, F)

    def locate(self, S: FinStructure) -> tuple[int, PartialMap]:
        an = Anatomy(self, S)
        i1, h1 = self.lower.age.index_of(self.m_part(S, an.M))
        srt = self.lower.age.member(i1).elements
        m = len(srt)
        member_colour = {h1(srt[k]): k for k in range(m)}  # S colour -> member element
        lower_member = self.lower.age.member(i1).relabel({x: k for k, x in enumerate(srt)})
        cpos = {c: k for k, c in enumerate(self.colour_order(lower_member))}
        upos = {u: k for k, u in enumerate(an.U)}
        stream = [0]
        stream += [upos[an.P[v]] + 1 if v in an.P else 0 for v in an.V]
        for v, w in itertools.combinations(an.V, 2):
            c = an.F.get(_pair(v, w))
            stream.append(0 if c is None else cpos[member_colour[c]] + 1)
        nv, nu = len(an.V), len(an.U)
        i = pair(i1, pair(nv, pair(nu, encode_naturals(stream))))
        iso = {k: h1(srt[k]) for k in range(m)}
        iso.update({m + k: v for k, v in enumerate(an.V)})
        iso.update({m + nv + k: u for k, u in enumerate(an.U)})
        return i, PartialMap(iso)

    # -- embeddings ---------------------------------------------------------------

    def decide(self, i: int, j: int, f: PartialMap) -> bool:
        A, B = self.member(i), self.member(j)
        if f.domain != A.universe or not f.is_injective or not f.range <= B.universe:
            return False
        n = self.names
        for s in SORTS:
            if any(B.holds(n[s], f(x)) != A.holds(n[s], x) for x in A.universe):
                return False
        i1, j1 = unpair(i)[0], unpair(j)[0]
        si, sj = self.lower.age.member(i1).elements, self.lower.age.member(j1).elements
        mi = A.unary(n["M"])
        g = PartialMap((si[k], sj[f(k)]) for k in mi)
        if not self.lower.age.decide_embedding(i1, j1, g):
            return False
        within = B.tuples_within(f.range)
        for name in self.new:
            image = {tuple(f(x) for x in t) for t in A.relation(name)}
            if image != set(within.get(name, ())):
                return False
        return True

    # -- amalgamation ---------------------------------------------------------------

    def amalgam(self, A: FinStructure, B: FinStructure, p: PartialMap, complete: bool = False):
        """Amalgamate over ``p`` (B side -> A side), keeping A's element names.

        First the M-parts through the lower level, then the U-orders, then
        the vertices.  With ``complete`` every vertex gets a P value and every
        pair of vertices a colour; otherwise cross pairs stay uncoloured.
        """
        a, b = Anatomy(self, A), Anatomy(self, B)
        n = self.names
        for x, y in p.pairs:
            if not all(B.holds(n[s], x) == A.holds(n[s], y) for s in SORTS):
                raise AmalgamFailed(f"common point {x}->{y} changes sort")
        used = set(A.universe)

        # M-parts
        bM = set(b.M)
        DM, faM, fbM = self.lower.age.amalgam(self.m_part(A, a.M), self.m_part(B, b.M),
                                              p.restrict(bM), complete)
        back = {faM(x): x for x in a.M}
        extra = [d for d in sorted(DM.universe) if d not in back]
        back.update(zip(extra, _fresh(used, len(extra))))
        used.update(back.values())
        DM = DM.relabel(back)
        fb = {x: back[fbM(x)] for x in b.M}

        # U-parts; a shared vertex forces its two P values together
        pU = {x: p(x) for x in b.U if x in p}
        for v in b.V:
            if v in p and v in b.P and p(v) in a.P:
                u, u2 = b.P[v], a.P[p(v)]
                if pU.setdefault(u, u2) != u2:
                    raise AmalgamFailed(f"vertex {v} would get two P values")
        apos = {u: k for k, u in enumerate(a.U)}
        images = [apos[pU[u]] for u in b.U if u in pU]
        if images != sorted(images) or len(set(pU.values())) != len(pU):
            raise AmalgamFailed("common U points are not order-compatible")
        merged, naming = merge_orders(a.U, b.U, pU)
        newU = [k for k in merged if isinstance(k, tuple)]
        freshU = dict(zip(newU, _fresh(used, len(newU))))
        used.update(freshU.values())
        U_order = [freshU.get(k, k) for k in merged]
        for x, k in naming.items():
            fb[x] = freshU.get(k, k)

        # vertices
        newV = [v for v in b.V if v not in p]
        for v, w in zip(newV, _fresh(used, len(newV))):
            fb[v] = w
        used.update(fb[v] for v in newV)
        for v in b.V:
            if v in p:
                fb[v] = p(v)
        V = a.V + [fb[v] for v in newV]
        P = dict(a.P)
        for v, u in b.P.items():
            P[fb[v]] = fb[u]
        F = dict(a.F)
        for e, c in b.F.items():
            v, w = tuple(e)
            key = _pair(fb[v], fb[w])
            if F.setdefault(key, fb[c]) != fb[c]:
                raise AmalgamFailed(f"pair {sorted(key)} would get two colours")

        order = self.colour_order(DM)
        rank = {c: k for k, c in enumerate(order)}
        pivots = [fb[v] for v in b.V]
        if star_violations(V, F, rank, pivots=pivots):
            raise AmalgamFailed("merged colouring breaks the star law")

        if complete:
            DM, F = self._complete_colours(DM, V, F, rank, used)
            for v in V:
                if v not in P:
                    (u,) = _fresh(used, 1)
                    used.add(u)
                    U_order.append(u)
                    P[v] = u
        D = self.assemble(DM, V, U_order, P, F)
        return D, PartialMap.identity(A.universe), PartialMap(fb)

    def _complete_colours(self, DM, V, F, rank, used):
        assignment, anchors = complete_coloring(V, F, rank)
        made: list[int] = []
        for anchor in anchors:
            at = None if anchor is None else made[anchor.k] if isinstance(anchor, Fresh) else anchor
            DM, x = self.lower.insert_u(DM, at)
            if x in used:
                (y,) = _fresh(used, 1)
                DM = DM.relabel({z: (y if z == x else z) for z in DM.universe})
                x = y
            used.add(x)
            made.append(x)
        F = dict(F)
        for e, c in assignment.items():
            F[e] = made[c.k] if isinstance(c, Fresh) else c
        return DM, F

    # -- extension types ------------------------------------------------------------

    def extensions(self, S: FinStructure) -> list:
        an = Anatomy(self, S)
        n = self.names
        x = max(S.universe, default=-1) + 1
        out = []
        for gap in range(len(an.U) + 1):
            below, above = an.U[:gap], an.U[gap:]
            rel = {n["U"]: [(x,)], n["<"]: [(u, x) for u in below] + [(x, u) for u in above]}
            out.append((S.extended([x], rel), x))
        MS = self.m_part(S, an.M)
        colours = self.colour_order(MS)
        rank = {c: k for k, c in enumerate(colours)}
        if an.U and (colours or not an.V):
            for u in an.U:
                for choice in itertools.product(colours, repeat=len(an.V)):
                    F = dict(zip(an.V, choice))
                    if any(_pair(s, t) in an.F and not self._triangle_ok(
                            rank[F[s]], rank[F[t]], rank[an.F[_pair(s, t)]])
                           for s, t in itertools.combinations(an.V, 2)):
                        continue
                    rel = {n["V"]: [(x,)], n["P"]: [(x, u)],
                           n["F"]: [t for s, c in F.items() for t in ((x, s, c), (s, x, c))]}
                    out.append((S.extended([x], rel), x))
        for Bm, xm in self.lower.age.extensions(MS):
            Bm = Bm.relabel({z: (x if z == xm else z) for z in Bm.universe})
            rel = {name: [t for t in ts if x in t] for name, ts in Bm.relations.items()}
            rel[n["M"]] = [(x,)]
            out.append((S.extended([x], rel), x))
        return out

    def insert_u(self, S: FinStructure, after: Optional[int]) -> tuple[FinStructure, int]:
        an = Anatomy(self, S)
        n = self.names
        x = max(S.universe, default=-1) + 1
        k = 0 if after is None else an.U.index(after) + 1
        rel = {n["U"]: [(x,)], n["<"]: [(u, x) for u in an.U[:k]] + [(x, u) for u in an.U[k:]]}
        return S.extended([x], rel), x

    # -- membership -------------------------------------------------------------------

    def validate(self, S: FinStructure) -> list[str]:
        if S.vocabulary is not self.vocabulary:
            raise VocabularyMismatch(f"expected {self.vocabulary.name}, got {S.vocabulary.name}")
        n = self.names
        bad = []
        sorts = {s: S.unary(n[s]) for s in SORTS}
        for x in S.elements:
            k = sum(x in sorts[s] for s in SORTS)
            if k != 1:
                bad.append(f"(1) {x} lies in {k} of V, M, U")
        Vs, Ms, Us = sorts["V"], sorts["M"], sorts["U"]
        for name in S.realized():
            if name not in self.new and any(y not in Ms for t in S.relation(name) for y in t):
                bad.append(f"(3) {name} holds outside M")
        MS = self.m_part(S, Ms)
        bad += [f"(2) M-part: {msg}" for msg in self.lower.validate(MS)]
        P: dict = {}
        for v, u in S.relation(n["P"]):
            if v not in Vs or u not in Us:
                bad.append(f"(4) P({v},{u}) outside V x U")
            if P.setdefault(v, u) != u:
                bad.append(f"(4) {v} has two P values")
        Ua = MS.unary(self.lower.u)
        F: dict = {}
        triples = S.relation(n["F"])
        for v, w, c in triples:
            if v not in Vs or w not in Vs or v == w:
                bad.append(f"(5) F({v},{w},{c}) not on a pair of distinct vertices")
                continue
            if c not in Ua:
                bad.append(f"(5) colour {c} not in {self.lower.u}")
            if (w, v, c) not in triples:
                bad.append(f"(5) F({v},{w},{c}) not symmetric")
            if F.setdefault(_pair(v, w), c) != c:
                bad.append(f"(5) pair {v},{w} has two colours")
        lt = S.relation(n["<"])
        if any(x not in Us or y not in Us for x, y in lt):
            bad.append(f"(6) {n['<']} holds outside U")
        below = {u: 0 for u in Us}
        for x, y in lt:
            if y in below:
                below[y] += 1
        ranks = sorted(below.values())
        if ranks != list(range(len(Us))) or len(lt) != len(Us) * (len(Us) - 1) // 2 or any(
                below.get(x, -1) >= below.get(y, -1) for x, y in lt):
            bad.append(f"(6) {n['<']} is not a linear order on U")
        if not any(m.startswith("(5)") for m in bad):
            colours = self.colour_order(MS)
            rank = {c: k for k, c in enumerate(colours)}
            for t in star_violations(Vs, F, rank):
                bad.append(f"(7) star law fails on {list(t)}")
        return bad


def build_successor(lower: TowerLevel) -> TowerLevel:
    K = SuccessorAge(lower)
    age = AgeRep(f"kb[{K.notation}]", K.vocabulary, K.member, decide_fn=K.decide,
                 locate=K.locate, amalgam=K.amalgam, extensions=K.extensions,
                 validator=K.validate)
    level = TowerLevel(K.notation, K.vocabulary, age, K.names["U"], K.names["<"],
                       K.insert_u, K.validate, distinguished=dict(K.names), lower=lower)
    level.successor_age = K
    return level


def validate_Kb(level: TowerLevel, S: FinStructure) -> list[str]:
    """Violations of the successor-level conditions; empty when ``S`` is a member."""
    return level.validate(S)
