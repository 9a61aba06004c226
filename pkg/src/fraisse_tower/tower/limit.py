"""Limit levels.

A member of the level for ``lim(e)`` is a finite sequence of blocks: block
``n`` is a copy of a member of the level ``e(n)``, its points are tagged by
the unary symbol ``Q[lim(e)]#n`` and renamed by the slot function
``p_n(k) = pair(n, k)``.  The new set ``U`` is the union of the blocks'
distinguished sets; the new order ``<`` follows each block's own order inside
the block and puts every point of block ``n`` below every point of block
``m`` when ``n < m``.

Member ``i`` reads its block contents from ``decode_naturals(i)``: entry
``n`` is 0 for "no block" and ``j + 1`` for a copy of member ``j``.
"""

from __future__ import annotations

import itertools
import threading
from typing import Callable, Iterator, Optional

from ..age import AgeRep, _fresh
from ..codec import decode_naturals, encode_naturals, pair
from ..errors import AmalgamFailed, NotationSyntaxError, NotLimit, VocabularyMismatch
from ..notations import Notation, limit_witness, parse_notation
from ..structures import (FinStructure, PartialMap, Symbol, SymbolFamily, Vocabulary,
                          empty_structure)
from .level import TowerLevel, tagged


class LimitAge:
    def __init__(self, a: Notation, level_of: Callable[[int], TowerLevel], horizon: int):
        if not a.is_lim:
            raise NotLimit(f"{a} is not a limit notation")
        self.notation = a
        self._level_of = level_of
        self._levels: dict[int, TowerLevel] = {}
        self._lock = threading.Lock()
        self.horizon = horizon
        self.u = tagged("U", a)
        self.lt = tagged("<", a)
        self.block_prefix = tagged("Q", a) + "#"
        for n in range(horizon + 1):
            self.level(n)
        self.vocabulary = Vocabulary(
            f"tau[{a}]", [Symbol(self.u, 1, a), Symbol(self.lt, 2, a)],
            families=[SymbolFamily(self._parse_block, self._enumerate_blocks),
                      SymbolFamily(self._parse_lower, self._enumerate_lower)])

    # -- levels and vocabulary ----------------------------------------------------

    def level(self, n: int) -> TowerLevel:
        with self._lock:
            lv = self._levels.get(n)
        if lv is None:
            lv = self._level_of(n)
            with self._lock:
                lv = self._levels.setdefault(n, lv)
        return lv

    def block_name(self, n: int) -> str:
        return f"{self.block_prefix}{n}"

    def _parse_block(self, name: str) -> Optional[Symbol]:
        if name.startswith(self.block_prefix) and name[len(self.block_prefix):].isdigit():
            return Symbol(name, 1, self.notation)
        return None

    def _enumerate_blocks(self) -> Iterator[Symbol]:
        for n in itertools.count():
            yield Symbol(self.block_name(n), 1, self.notation)

    def _parse_lower(self, name: str) -> Optional[Symbol]:
        for lv in list(self._levels.values()):
            sym = lv.vocabulary.find(name)
            if sym is not None:
                return sym
        # a name tagged by a notation below the limit lives in some later level
        if "[" in name and name.endswith("]"):
            try:
                x = parse_notation(name[name.index("[") + 1:-1])
            except NotationSyntaxError:
                return None
            n = limit_witness(x, self.notation)
            if n is not None:
                return self.level(n).vocabulary.find(name)
        return None

    def _enumerate_lower(self) -> Iterator[Symbol]:
        sources: list = []
        for n in itertools.count():
            sources.append(iter(self.level(n).vocabulary))
            for src in sources:
                sym = next(src, None)
                if sym is not None:
                    yield sym

    # -- assembly -------------------------------------------------------------------

    def blocks_of(self, S: FinStructure) -> dict[int, FinStructure]:
        """Block ``n`` of ``S`` as a structure over the vocabulary of level ``n``."""
        out = {}
        for name in S.realized():
            if name.startswith(self.block_prefix):
                n = int(name[len(self.block_prefix):])
                elems = {t[0] for t in S.relation(name)}
                voc = self.level(n).vocabulary
                rel = {nm: ts for nm, ts in S.tuples_within(elems).items()
                       if voc.find(nm) is not None}
                out[n] = FinStructure(voc, elems, rel, check=False)
        return out

    def assemble(self, blocks: dict[int, FinStructure]) -> FinStructure:
        rel: dict[str, set] = {}
        us: list[tuple[int, FinStructure]] = []
        for n in sorted(blocks):
            Bn = blocks[n]
            if not len(Bn):
                continue
            for name, ts in Bn.relations.items():
                rel.setdefault(name, set()).update(ts)
            rel[self.block_name(n)] = {(x,) for x in Bn.universe}
            lv = self.level(n)
            rel.setdefault(self.u, set()).update(Bn.relation(lv.u))
            rel.setdefault(self.lt, set()).update(Bn.relation(lv.lt))
            us.append((n, Bn))
        for (n, Bn), (m, Bm) in itertools.combinations(us, 2):
            un, um = Bn.unary(self.level(n).u), Bm.unary(self.level(m).u)
            rel[self.lt].update((x, y) for x in un for y in um)
        universe = set().union(*(Bn.universe for Bn in blocks.values())) if blocks else set()
        return FinStructure(self.vocabulary, universe, rel, check=False)

    def sigma(self, i: int) -> dict[int, int]:
        return {n: k - 1 for n, k in enumerate(decode_naturals(i)) if k > 0}

    def member(self, i: int) -> FinStructure:
        blocks = {}
        for n, j in self.sigma(i).items():
            raw = self.level(n).age.member(j)
            blocks[n] = raw.relabel({x: pair(n, k) for k, x in enumerate(raw.elements)})
        return self.assemble(blocks)

    def _live(self, i: int) -> dict[int, int]:
        return {n: j for n, j in self.sigma(i).items() if len(self.level(n).age.member(j))}

    # -- age hooks ------------------------------------------------------------------

    def decide(self, i: int, j: int, f: PartialMap) -> bool:
        si, sj = self._live(i), self._live(j)
        if not set(si) <= set(sj):
            return False
        A, B = self.member(i), self.member(j)
        if f.domain != A.universe or not f.is_injective or not f.range <= B.universe:
            return False
        for n, jn in si.items():
            ei = self.level(n).age.member(jn).elements
            ej = self.level(n).age.member(sj[n]).elements
            slot = {pair(n, k): k for k in range(len(ej))}
            g = {}
            for k, x in enumerate(ei):
                y = f(pair(n, k))
                if y not in slot:
                    return False
                g[x] = ej[slot[y]]
            if not self.level(n).age.decide_embedding(jn, sj[n], PartialMap(g)):
                return False
        return True

    def locate(self, S: FinStructure) -> tuple[int, PartialMap]:
        blocks = self.blocks_of(S)
        top = max(blocks, default=-1)
        seq = [0] * (top + 1)
        iso = {}
        for n, Bn in blocks.items():
            j, h = self.level(n).age.index_of(Bn)
            seq[n] = j + 1
            for k, x in enumerate(self.level(n).age.member(j).elements):
                iso[pair(n, k)] = h(x)
        return encode_naturals(seq), PartialMap(iso)

    def _rename_apart(self, Dn: FinStructure, keep: dict, used: set) -> tuple[FinStructure, dict]:
        """Rename ``Dn`` so ``keep`` (D name -> wanted name) holds and the rest avoids ``used``."""
        extra = [d for d in sorted(Dn.universe) if d not in keep]
        mapping = dict(keep)
        mapping.update(zip(extra, _fresh(used, len(extra))))
        used.update(mapping.values())
        return Dn.relabel(mapping), mapping

    def amalgam(self, A: FinStructure, B: FinStructure, p: PartialMap, complete: bool = False):
        ba, bb = self.blocks_of(A), self.blocks_of(B)
        where_a = {x: n for n, Bn in ba.items() for x in Bn.universe}
        for x, y in p.pairs:
            n = next((m for m, Bm in bb.items() if x in Bm.universe), None)
            if where_a.get(y) != n:
                raise AmalgamFailed(f"common point {x}->{y} changes block")
        used = set(A.universe)
        blocks, fb = {}, {}
        for n in sorted(set(ba) | set(bb)):
            lv = self.level(n)
            An = ba.get(n, empty_structure(lv.vocabulary))
            Bn = bb.get(n, empty_structure(lv.vocabulary))
            if not len(Bn):
                blocks[n] = An
                continue
            Dn, fa_n, fb_n = lv.age.amalgam(An, Bn, p.restrict(Bn.universe), complete)
            Dn, mapping = self._rename_apart(Dn, {fa_n(x): x for x in An.universe}, used)
            blocks[n] = Dn
            fb.update({x: mapping[fb_n(x)] for x in Bn.universe})
        return self.assemble(blocks), PartialMap.identity(A.universe), PartialMap(fb)

    def extensions(self, S: FinStructure) -> list:
        blocks = self.blocks_of(S)
        x = max(S.universe, default=-1) + 1
        out = []
        for n in sorted(set(blocks) | {max(blocks, default=-1) + 1}):
            lv = self.level(n)
            base = blocks.get(n, empty_structure(lv.vocabulary))
            for Bn, xn in lv.age.extensions(base):
                Bn = Bn.relabel({z: (x if z == xn else z) for z in Bn.universe})
                out.append((self.assemble({**blocks, n: Bn}), x))
        return out

    def insert_u(self, S: FinStructure, after: Optional[int]) -> tuple[FinStructure, int]:
        blocks = self.blocks_of(S)
        if after is None:
            n = 0  # block 0 sits below every other block
        else:
            n = next(m for m, Bm in blocks.items() if after in Bm.universe)
        lv = self.level(n)
        Bn = blocks.get(n, empty_structure(lv.vocabulary))
        Bn2, x = lv.insert_u(Bn, after)
        if x in S.universe:
            (y,) = _fresh(set(S.universe) | set(Bn2.universe), 1)
            Bn2 = Bn2.relabel({z: (y if z == x else z) for z in Bn2.universe})
            x = y
        return self.assemble({**blocks, n: Bn2}), x

    # -- membership ------------------------------------------------------------------

    def order_law(self, S: FinStructure) -> set:
        """The order on ``U`` computed from block indices and within-block orders."""
        blocks = self.blocks_of(S)
        block = {x: n for n, Bn in blocks.items() for x in Bn.universe}
        within = {n: Bn.relation(self.level(n).lt) for n, Bn in blocks.items()}
        us = sorted(S.unary(self.u))
        law = set()
        for x, y in itertools.permutations(us, 2):
            n, m = block.get(x), block.get(y)
            if n is None or m is None:
                continue
            if n < m or (n == m and (x, y) in within[n]):
                law.add((x, y))
        return law

    def validate(self, S: FinStructure) -> list[str]:
        if S.vocabulary is not self.vocabulary:
            raise VocabularyMismatch(f"expected {self.vocabulary.name}, got {S.vocabulary.name}")
        bad = []
        tags: dict[int, list] = {}
        for name in S.realized():
            if name.startswith(self.block_prefix):
                for (x,) in S.relation(name):
                    tags.setdefault(x, []).append(name)
        for x in S.elements:
            if len(tags.get(x, [])) != 1:
                bad.append(f"{x} lies in {len(tags.get(x, []))} blocks")
        if bad:
            return bad
        blocks = self.blocks_of(S)
        block = {x: n for n, Bn in blocks.items() for x in Bn.universe}
        own = {self.u, self.lt}
        for name in S.realized():
            if name in own or name.startswith(self.block_prefix):
                continue
            for t in S.relation(name):
                ns = {block[y] for y in t}
                if len(ns) != 1:
                    bad.append(f"{name}{t} spans blocks")
                elif self.level(ns.pop()).vocabulary.find(name) is None:
                    bad.append(f"{name} is not a symbol of the level of its block")
        for n, Bn in blocks.items():
            bad += [f"block {n}: {msg}" for msg in self.level(n).validate(Bn)]
        expected_u = set().union(*(Bn.unary(self.level(n).u) for n, Bn in blocks.items())) \
            if blocks else set()
        if set(S.unary(self.u)) != expected_u:
            bad.append(f"{self.u} is not the union of the blocks' distinguished sets")
        if set(S.relation(self.lt)) != self.order_law(S):
            bad.append(f"{self.lt} breaks the block order law")
        return bad


def build_limit(a: Notation, level_of: Callable[[int], TowerLevel], horizon: int) -> TowerLevel:
    K = LimitAge(a, level_of, horizon)
    age = AgeRep(f"tower[{a}]", K.vocabulary, K.member, decide_fn=K.decide, locate=K.locate,
                 amalgam=K.amalgam, extensions=K.extensions, validator=K.validate)
    level = TowerLevel(a, K.vocabulary, age, K.u, K.lt, K.insert_u, K.validate,
                       distinguished={"U": K.u, "<": K.lt, "Q": K.block_prefix + "n"})
    level.limit_age = K
    return level
