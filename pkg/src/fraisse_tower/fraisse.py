"""Stage-by-stage construction of a Fraisse limit from a computable age.

The builder keeps one growing structure whose universe is always an initial
segment of the naturals; stage ``s`` is the substructure on the first
``n_s`` points.  Tasks run from a single FIFO queue:

* ``EmbedMember(i)`` is injected at step ``i`` and makes ``member(i)`` embed;
* ``Saturate(S)`` realizes every one-point extension type the age offers
  over the finite set ``S`` of realized points;
* ``ExtendIso(p, x, side)`` adds one point to a partial isomorphism.

``Saturate`` tasks arrive in lazy batches: when point ``k`` is born, the
subsets whose largest element is ``k`` (up to the configured size) are
queued.  Saturating all subsets of size ``<= cap`` is what makes partial
isomorphisms of that size extendable.  Subsets of each size wait in their
own FIFO lane and the lanes take turns, so the linear number of pairs born
with a point is not stuck behind the quadratic number of triples.
"""

from __future__ import annotations

import itertools
import logging
import random
from bisect import bisect_left
from collections import Counter, deque
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional

from .age import AgeRep, check_age_axioms, search_amalgam
from .errors import (AmalgamFailed, BudgetExhausted, DefectiveAge, PreconditionFailed,
                     RangeNotBuilt)
from .structures import (FinStructure, PartialMap, empty_structure, find_embedding,
                         is_embedding, substructure)

log = logging.getLogger(__name__)

DEFAULT_CAP = 3
SMOKE_BOUNDS = (2, 8)
EMBED_SEARCH_LIMIT = 5000
FREE = "free"


@dataclass
class Task:
    kind: str  # "embed" | "saturate" | "extend"
    born: int
    deadline: int
    index: Optional[int] = None
    subset: tuple = ()
    p: Optional[PartialMap] = None
    point: Optional[int] = None
    side: str = "domain"

    def __str__(self) -> str:
        if self.kind == "embed":
            return f"EmbedMember({self.index})"
        if self.kind == "saturate":
            return f"Saturate({list(self.subset)})"
        return f"ExtendIso({self.p}, {self.point}, {self.side})"


@dataclass
class _Batch:
    """Saturate tasks for the subsets whose largest element is ``top``."""

    top: int
    born: int
    deadline: int
    size: int
    subsets: Iterator[tuple]


@dataclass
class TaskRecord:
    task: str
    born: int
    deadline: int
    executed: int
    outcome: str


@dataclass
class LimitBuilder:
    age: AgeRep
    schedule_id: int = 0
    cap: int = DEFAULT_CAP
    current: FinStructure = None
    sizes: list = field(default_factory=lambda: [0])
    lanes: list = field(default_factory=list)
    lane_pending: list = field(default_factory=list)
    next_member: int = 0
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    keep_records: bool = True

    def __post_init__(self):
        if self.current is None:
            self.current = empty_structure(self.age.vocabulary)
        self._witness: dict[int, tuple[int, PartialMap]] = {}
        self._profiles: dict[int, frozenset] = {}
        self._profile_count: Counter = Counter()
        self.lanes = [deque() for _ in range(self.cap)]
        self.lane_pending = [0] * self.cap
        self._turn = 0
        self._enqueue_batch(-1)

    # -- stages ---------------------------------------------------------------

    @property
    def step(self) -> int:
        return len(self.sizes) - 1

    def stage(self, s: int) -> FinStructure:
        n = self.sizes[s]
        if n == len(self.current):
            return self.current
        return substructure(self.current, range(n))

    def witness(self, s: int) -> tuple[int, PartialMap]:
        """``(i_s, f_s)`` with ``f_s`` an isomorphism from ``member(i_s)`` onto stage ``s``."""
        n = self.sizes[s]
        if n not in self._witness:
            self._witness[n] = self.age.index_of(self.stage(s))
        return self._witness[n]

    # -- queue ------------------------------------------------------------------

    @property
    def pending(self) -> int:
        return sum(self.lane_pending)

    def _subsets(self, top: int, r: int) -> Iterator[tuple]:
        combos = list(itertools.combinations(range(top), r))
        if self.schedule_id:
            random.Random(f"{self.schedule_id}:{top}:{r}").shuffle(combos)
        for rest in combos:
            yield rest + (top,)

    def _deadline(self, lane: int, size: int) -> int:
        # every lane is served at least once per round of len(lanes) pulls
        return self.step + len(self.lanes) * (self.lane_pending[lane] + size)

    def _enqueue_batch(self, top: int) -> None:
        if top < 0:
            self.lanes[0].append(_Batch(top, self.step, self._deadline(0, 1), 1, iter([()])))
            self.lane_pending[0] += 1
            return
        for r in range(self.cap):
            size = comb(top, r)
            if size:
                batch = _Batch(top, self.step, self._deadline(r, size), size,
                               self._subsets(top, r))
                self.lanes[r].append(batch)
                self.lane_pending[r] += size

    def _enqueue(self, task: Task) -> None:
        task.deadline = self._deadline(0, 1)
        self.lanes[0].append(task)
        self.lane_pending[0] += 1

    def _pull(self, lane: int) -> Optional[Task]:
        queue = self.lanes[lane]
        while queue:
            head = queue[0]
            if isinstance(head, Task):
                queue.popleft()
                self.lane_pending[lane] -= 1
                return head
            subset = next(head.subsets, None)
            if subset is None:
                queue.popleft()
                continue
            head.size -= 1
            self.lane_pending[lane] -= 1
            return Task("saturate", head.born, head.deadline, subset=subset)
        return None

    def _next_task(self) -> Optional[Task]:
        n = len(self.lanes)
        for k in range(n):
            lane = (self._turn + k) % n
            task = self._pull(lane)
            if task is not None:
                self._turn = (lane + 1) % n
                return task
        return None

    # -- growth -------------------------------------------------------------------

    def _profile(self, y: int) -> frozenset:
        # Tuples mentioning only y; they never change once y exists.
        prof = self._profiles.get(y)
        if prof is None:
            prof = frozenset((name, tuple(None for _ in t))
                             for name, t in self.current.incident(y) if set(t) == {y})
            self._profiles[y] = prof
            self._profile_count[prof] += 1
        return prof

    def _adopt(self, D: FinStructure, fa: PartialMap) -> dict:
        """Make ``D`` the new current stage; returns the renaming applied to D."""
        old = self.current
        rename = {fa(a): a for a in old.universe}
        n = len(old)
        for d in sorted(D.universe):
            if d not in rename:
                rename[d] = n
                n += 1
        self.current = D.relabel(rename)
        for y in range(len(old), n):
            self._enqueue_batch(y)
            self._profile(y)
        return rename

    def _amalgamate(self, B: FinStructure, p: PartialMap) -> dict:
        """Amalgamate ``B`` into the current stage over ``p`` (B side -> stage side).

        Returns a map from B's elements to their names in the new stage.
        """
        A = self.current
        if self.age.amalgam is not None:
            D, fa, fb = self.age.amalgam(A, B, p, True)
        else:
            D, fa, fb = self._amalgamate_by_search(A, B, p)
        rename = self._adopt(D, fa)
        return {b: rename[fb(b)] for b in B.universe}

    def _amalgamate_by_search(self, A: FinStructure, B: FinStructure, p: PartialMap):
        K = self.age
        ia, ha = K.index_of(A)
        ib, hb = K.index_of(B)
        C = substructure(B, p.domain)
        ic, hc = K.index_of(C)
        f = ha.inverse().compose(p).compose(hc)
        g = hb.inverse().compose(hc)
        cert = search_amalgam(K, ia, ib, ic, f, g)
        return cert.D, cert.f_prime.compose(ha.inverse()), cert.g_prime.compose(hb.inverse())

    def _run_embed(self, task: Task) -> str:
        M = self.age.member(task.index)
        if find_embedding(M, self.current, limit=EMBED_SEARCH_LIMIT) is not None:
            return FREE
        self._amalgamate(M, PartialMap())
        return "amalgamated"

    def _realized_signatures(self, S: tuple) -> set:
        cur = self.current
        sset = set(S)
        sig: dict[int, set] = {}
        for s in S:
            for name, t in cur.incident(s):
                others = {z for z in t if z not in sset}
                if len(others) == 1:
                    (y,) = others
                    sig.setdefault(y, set()).add((name, tuple(None if z == y else z for z in t)))
        out = {frozenset(v | self._profile(y)) for y, v in sig.items()}
        local = Counter(self._profile(y) for y in itertools.chain(sig, S))
        for prof, cnt in self._profile_count.items():
            if cnt > local[prof]:
                out.add(prof)
        return out

    @staticmethod
    def _type_signature(B: FinStructure, x: int) -> frozenset:
        return frozenset((name, tuple(None if z == x else z for z in t))
                         for name, t in B.incident(x))

    def _run_saturate(self, task: Task) -> str:
        S = task.subset
        base = substructure(self.current, S)
        types = self.age.extensions(base) if self.age.extensions else []
        if not types:
            return FREE
        seen = self._realized_signatures(S)
        added = 0
        for B, x in types:
            sig = self._type_signature(B, x)
            if sig in seen:
                continue
            self._amalgamate(B, PartialMap.identity(S))
            seen = self._realized_signatures(S)
            added += 1
        return f"realized {added}/{len(types)}"

    def _run_extend(self, task: Task) -> PartialMap:
        p, x = task.p, task.point
        if task.side == "range":
            p = p.inverse()
        if x in p.domain:
            q = p
        else:
            B = substructure(self.current, p.domain | {x})
            free = sorted(self.current.universe - p.range)
            y = None
            hit = find_embedding(B, self.current, fixed=p, candidates={x: free})
            if hit is not None:
                y = hit(x)
            else:
                names = self._amalgamate(B, p)
                y = names[x]
            q = p.extend(x, y)
        return q.inverse() if task.side == "range" else q

    def _execute(self, task: Task):
        try:
            if task.kind == "embed":
                outcome = self._run_embed(task)
            elif task.kind == "saturate":
                outcome = self._run_saturate(task)
            else:
                return "extended", self._run_extend(task)
        except AmalgamFailed as exc:
            outcome = f"skipped: {exc}"
            self.failures.append((str(task), str(exc)))
            log.info("task %s skipped: %s", task, exc)
        return outcome, None

    def grow(self, steps: int) -> FinStructure:
        """Execute ``steps`` tasks and return the current stage.

        ``EmbedMember`` tasks whose member already embeds and ``Saturate``
        tasks without any extension types are discharged for free.
        """
        done = 0
        while done < steps:
            if self.next_member <= self.step:
                self._enqueue(Task("embed", self.step, 0, index=self.next_member))
                self.next_member += 1
            task = self._next_task()
            if task is None:
                break
            outcome, _ = self._execute(task)
            if outcome == FREE:
                self._record(task, outcome)
                continue
            self.sizes.append(len(self.current))
            self._record(task, outcome)
            done += 1
        return self.current

    def _record(self, task: Task, outcome: str) -> None:
        if self.keep_records:
            self.records.append(TaskRecord(str(task), task.born, task.deadline, self.step, outcome))

    # -- queries ------------------------------------------------------------------

    def _stage_covering(self, points) -> int:
        top = max(points, default=-1)
        if top >= len(self.current):
            raise RangeNotBuilt(f"point {top} not yet built (current size {len(self.current)})")
        return bisect_left(self.sizes, top + 1)

    def decide_E_limit(self, i: int, f: PartialMap) -> bool:
        """Does ``f`` embed ``member(i)`` into the limit (equivalently, the current stage)?"""
        s = self._stage_covering(f.range)
        i_s, f_s = self.witness(s)
        g = f_s.inverse().compose(f)
        if len(g.domain) != len(f.domain):
            return False
        return self.age.decide_embedding(i, i_s, g)

    def is_partial_iso(self, f: PartialMap) -> bool:
        self._stage_covering(f.domain | f.range)
        dom = substructure(self.current, f.domain)
        i, g = self.age.index_of(dom)
        if not self.decide_E_limit(i, g):
            raise PreconditionFailed("located member does not embed onto its own copy")
        return self.decide_E_limit(i, f.compose(g))

    def extend_iso(self, f: PartialMap, x: int, side: str = "domain",
                   budget: int = 10_000) -> PartialMap:
        """Extend the partial isomorphism ``f`` by the point ``x`` on the given side."""
        if side not in ("domain", "range"):
            raise ValueError(f"side must be 'domain' or 'range', not {side!r}")
        self._stage_covering([x])
        if not self.is_partial_iso(f):
            raise PreconditionFailed(f"{f} is not a partial isomorphism")
        task = Task("extend", self.step, self.step + 1, p=f, point=x, side=side)
        outcome, q = self._execute(task)
        if q is None:
            raise BudgetExhausted(f"could not extend {f} by {x}: {outcome}")
        self.sizes.append(len(self.current))
        self._record(task, outcome)
        return q

    def chain_ok(self) -> bool:
        """Every stage is an initial segment of the current structure (by construction)."""
        return all(a <= b for a, b in zip(self.sizes, self.sizes[1:]))

    def fairness_violations(self) -> list[TaskRecord]:
        return [r for r in self.records if r.executed > r.deadline]


def new_builder(K: AgeRep, schedule_id: int = 0, cap: int = DEFAULT_CAP,
                smoke: Optional[tuple[int, int]] = SMOKE_BOUNDS) -> LimitBuilder:
    """A builder with stage 0 empty; raises DefectiveAge if the smoke check fails."""
    if smoke is not None:
        report = check_age_axioms(K, smoke[0], smoke[1])
        if not report.ok:
            raise DefectiveAge(f"{K.tag} fails the axiom smoke check", report)
    return LimitBuilder(K, schedule_id=schedule_id, cap=cap)


def is_partial_isomorphism(A: FinStructure, f: PartialMap) -> bool:
    """Direct check: ``f`` is an isomorphism between the induced substructures of ``A``."""
    if not f.is_injective:
        return False
    dom = substructure(A, f.domain)
    return is_embedding(f, dom, A)
