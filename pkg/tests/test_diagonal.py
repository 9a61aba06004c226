import dataclasses
import random

import pytest
from hypothesis import given, strategies as st

from fraisse_tower import diagonal
from fraisse_tower.diagonal import IDENTITY2, EnumerationTrace, Event, run, verify
from fraisse_tower.structures import PartialMap


def test_empty_trace():
    out = run(EnumerationTrace(), 1, 10)
    (r,) = out.report
    assert r.is_embedding and not r.in_trace and r.disagrees
    assert verify(out.report)


def test_firing_colours_zero():
    out = run(EnumerationTrace([Event(5, 0, 0, 1, IDENTITY2)]), 1, 10)
    (r,) = out.report
    assert r.fired_at == 5 and r.in_trace and not r.is_embedding
    assert r.C_i.holds(f"U{out.state.records[0].colour}", 0)
    assert not any(r.C_next.holds(n, 0) for n in r.C_next.realized())
    assert verify(out.report)


def test_two_requirements_opposite_directions():
    out = run(EnumerationTrace([Event(3, 1, 2, 3, IDENTITY2)]), 2, 10)
    a, b = out.report
    assert (a.in_trace, a.is_embedding) == (False, True)
    assert (b.in_trace, b.is_embedding) == (True, False)
    assert verify(out.report)


def test_sabotaged_report_fails():
    out = run(EnumerationTrace([Event(2, 0, 0, 1, IDENTITY2)]), 1, 5)
    bad = dataclasses.replace(out.report[0], C_i=diagonal.coloured([None, 0]))
    assert not verify([bad])
    assert verify([])


def test_events_after_horizon_are_ignored():
    out = run(EnumerationTrace([Event(9, 0, 0, 1, IDENTITY2)]), 1, 5)
    assert not out.report[0].in_trace and out.report[0].is_embedding


def test_designated_structures_have_the_vowed_shape():
    out = run(EnumerationTrace(), 3, 4)
    for r in out.report:
        assert r.C_i.elements == [0, 1] and r.C_next.elements == [0, 1, 2]
        assert r.C_i.holds(f"U{r.i}", 1) and r.C_next.holds(f"U{r.i}", 1)
        assert r.C_next.holds(f"U{r.i + 1}", 2)


def test_trace_stages_must_increase():
    with pytest.raises(ValueError):
        EnumerationTrace([Event(3, 0, 0, 1, IDENTITY2), Event(3, 0, 1, 2, IDENTITY2)])


def test_trace_json_round_trip():
    t = diagonal.random_trace(random.Random(4), 3, 12)
    assert EnumerationTrace.from_json(t.to_json()) == t


@given(st.integers(0, 2 ** 32), st.integers(0, 6), st.integers(0, 25))
def test_diagonalization_always_succeeds(seed, k, stages):
    trace = diagonal.random_trace(random.Random(seed), k, stages)
    out = run(trace, k, stages)
    assert verify(out.report)
    for i in range(2 * k + 12):
        M = out.age.member(i)
        assert out.age.violations(M) == []
        assert out.age.decide_embedding(i, i, PartialMap.identity(M.universe))


def test_canonical_listing_covers_small_members():
    seen = {tuple(sorted((n, x) for n in diagonal.canonical_member(j).realized()
                         for (x,) in diagonal.canonical_member(j).relation(n)))
            for j in range(2000) if len(diagonal.canonical_member(j)) == 2}
    assert len(seen) >= 9
