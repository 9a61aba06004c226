"""A representation of a coloured age whose embedding relation defeats given enumerations.

The age ``K`` consists of finite structures with unary colours ``U0, U1, ...``
where every element carries at most one colour.  Requirement ``e`` owns the
indices ``i = 2e`` and ``i + 1``: ``C_i`` has universe ``{0, 1}`` and
``C_{i+1}`` universe ``{0, 1, 2}``; ``1`` carries ``U_i`` in both and ``2``
carries ``U_{i+1}`` in ``C_{i+1}``.  Element ``0`` stays colourless while the
enumeration ``W_e`` has not listed ``(i, i+1, id)``, so ``id`` embeds.  Once it
is listed, ``0`` gets a colour in ``C_i`` that was never ruled out, and ``id``
stops being an embedding.  Either way ``W_e`` and the embedding relation
disagree on that triple.

Enumerations are simulated by finite traces.  Indices past the designated
ones list every member of ``K`` in a fixed order.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .age import AgeRep
from .codec import decode_naturals
from .structures import FinStructure, PartialMap, Symbol, SymbolFamily, Vocabulary, is_embedding

IDENTITY2 = PartialMap({0: 0, 1: 1})


def _parse_colour(name: str) -> Optional[Symbol]:
    m = re.fullmatch(r"U(0|[1-9][0-9]*)", name)
    return Symbol(name, 1) if m else None


def _enumerate_colours() -> Iterator[Symbol]:
    n = 0
    while True:
        yield Symbol(f"U{n}", 1)
        n += 1


COLOURS = Vocabulary("colours", families=[SymbolFamily(_parse_colour, _enumerate_colours)])


def coloured(colours: list[Optional[int]]) -> FinStructure:
    """Structure on ``0..len-1`` where element ``k`` carries ``U_colours[k]`` (or nothing)."""
    rel: dict = {}
    for k, c in enumerate(colours):
        if c is not None:
            rel.setdefault(f"U{c}", []).append((k,))
    return FinStructure(COLOURS, range(len(colours)), rel)


def canonical_member(j: int) -> FinStructure:
    """``j``-th member of the fixed listing: entry 0 is colourless, ``c + 1`` is ``U_c``."""
    return coloured([None if c == 0 else c - 1 for c in decode_naturals(j)])


def colour_violations(S: FinStructure) -> list[str]:
    seen: dict = {}
    bad = []
    for name in S.realized():
        for (x,) in S.relation(name):
            if x in seen:
                bad.append(f"{x} carries {seen[x]} and {name}")
            seen[x] = name
    return bad


@dataclass(frozen=True)
class Event:
    stage: int
    e: int
    i: int
    j: int
    f: PartialMap


@dataclass
class EnumerationTrace:
    events: list[Event] = field(default_factory=list)

    def __post_init__(self):
        last: dict = {}
        for ev in self.events:
            if ev.stage <= last.get(ev.e, -1):
                raise ValueError(f"stages for requirement {ev.e} must increase strictly")
            last[ev.e] = ev.stage

    @classmethod
    def from_json(cls, data) -> "EnumerationTrace":
        rows = data["events"] if isinstance(data, dict) else data
        return cls([Event(int(r["stage"]), int(r["e"]), int(r["i"]), int(r["j"]),
                          PartialMap({int(k): int(v) for k, v in r["f"]}))
                    for r in rows])

    def to_json(self) -> dict:
        return {"events": [{"stage": ev.stage, "e": ev.e, "i": ev.i, "j": ev.j,
                            "f": [list(p) for p in ev.f.pairs]} for ev in self.events]}


def random_trace(rng: random.Random, requirements: int, stages: int,
                 p_fire: float = 0.5, noise: int = 4) -> EnumerationTrace:
    """Random events per requirement: noise triples and, sometimes, the designated one."""
    events = []
    for e in range(requirements):
        i = 2 * e
        picks = sorted(rng.sample(range(stages + 2), min(noise, stages + 2)))
        fire_at = rng.choice(picks) if rng.random() < p_fire else None
        for s in picks:
            if s == fire_at:
                events.append(Event(s, e, i, i + 1, IDENTITY2))
            else:
                j = rng.randrange(2 * requirements + 3)
                f = PartialMap({0: rng.randrange(3), 1: rng.randrange(3)})
                if (j, f) == (i + 1, IDENTITY2):
                    f = PartialMap({0: 1, 1: 0})
                events.append(Event(s, e, rng.randrange(2 * requirements + 3), j, f))
    events.sort(key=lambda ev: (ev.stage, ev.e))
    return EnumerationTrace(events)


@dataclass
class RequirementRecord:
    e: int
    i: int
    ruled_out: int = 0  # colours 0..ruled_out-1 already denied to element 0 of C_i
    fired_at: Optional[int] = None
    colour: Optional[int] = None


@dataclass
class DiagonalState:
    records: list[RequirementRecord]
    diagrams: dict[int, list]  # index -> colours per element

    def structure(self, k: int) -> FinStructure:
        return coloured(self.diagrams[k])


@dataclass
class RequirementReport:
    e: int
    i: int
    in_trace: bool
    is_embedding: bool
    fired_at: Optional[int]
    C_i: FinStructure
    C_next: FinStructure

    @property
    def disagrees(self) -> bool:
        return self.in_trace != self.is_embedding


@dataclass
class DiagonalRun:
    age: AgeRep
    state: DiagonalState
    report: list[RequirementReport]


def run(trace: EnumerationTrace, requirements: int, stages: int) -> DiagonalRun:
    """Stagewise construction against ``trace`` for requirements ``0..requirements-1``."""
    records = [RequirementRecord(e, 2 * e) for e in range(requirements)]
    diagrams: dict[int, list] = {}
    for r in records:
        diagrams[r.i] = [None, r.i]
        diagrams[r.i + 1] = [None, r.i, r.i + 1]
    by_stage: dict[int, list] = {}
    for ev in trace.events:
        by_stage.setdefault(ev.stage, []).append(ev)
    for s in range(stages):
        for ev in by_stage.get(s, ()):
            if ev.e >= requirements:
                continue
            r = records[ev.e]
            if r.fired_at is None and (ev.i, ev.j, ev.f) == (r.i, r.i + 1, IDENTITY2):
                r.fired_at = s
                r.colour = r.ruled_out
                diagrams[r.i][0] = r.colour
        for r in records:
            if r.fired_at is None:
                r.ruled_out += 1  # this stage's diagram says not U_s(0)
    state = DiagonalState(records, diagrams)
    offset = 2 * requirements

    def member(k: int) -> FinStructure:
        return state.structure(k) if k < offset else canonical_member(k - offset)

    def decide(i: int, j: int, f: PartialMap) -> bool:
        return is_embedding(f, member(i), member(j))

    age = AgeRep("diagonal", COLOURS, member, decide, validator=colour_violations)
    seen = [(ev.e, ev.i, ev.j, ev.f) for ev in trace.events if ev.stage < stages]
    report = []
    for r in records:
        Ci, Cn = member(r.i), member(r.i + 1)
        report.append(RequirementReport(
            r.e, r.i, (r.e, r.i, r.i + 1, IDENTITY2) in seen,
            is_embedding(IDENTITY2, Ci, Cn), r.fired_at, Ci, Cn))
    return DiagonalRun(age, state, report)


def _brute_force_embeds(f: PartialMap, A: FinStructure, B: FinStructure) -> bool:
    if set(f.domain) != set(A.universe) or not set(f.range) <= set(B.universe):
        return False
    if len(set(f.range)) != len(A):
        return False
    names = set(A.realized()) | set(B.realized())
    return all(A.holds(n, x) == B.holds(n, f(x)) for n in names for x in A.elements)


def verify(report: list[RequirementReport]) -> bool:
    """Every requirement's triple is in the trace iff it is not an embedding."""
    return all(r.in_trace != _brute_force_embeds(IDENTITY2, r.C_i, r.C_next) for r in report)
