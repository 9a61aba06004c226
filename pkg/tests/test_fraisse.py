import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fraisse_tower.age import broken_linear_orders, chain, finite_graphs, linear_orders
from fraisse_tower.errors import DefectiveAge, RangeNotBuilt
from fraisse_tower.fraisse import is_partial_isomorphism, new_builder
from fraisse_tower.structures import PartialMap, is_embedding, substructure
from fraisse_tower.tower import build_base

_cache = {}


def grown(tag, steps, token=0):
    key = (tag, steps, token)
    if key not in _cache:
        K = {"linorders": linear_orders, "graphs": finite_graphs,
             "k1": lambda: build_base().age}[tag]()
        b = new_builder(K, token)
        b.grow(steps)
        _cache[key] = b
    return _cache[key]


def test_fresh_builder_is_empty():
    b = new_builder(linear_orders())
    assert len(b.current) == 0 and b.step == 0
    assert len(b.grow(0)) == 0


def test_defective_age_rejected():
    with pytest.raises(DefectiveAge) as exc:
        new_builder(broken_linear_orders())
    assert exc.value.report.hp


@pytest.mark.parametrize("tag", ["linorders", "graphs", "k1"])
def test_chain_and_witness_properties(tag):
    b = grown(tag, 120)
    assert b.chain_ok()
    for s in range(0, b.step + 1, 7):
        S, T = b.stage(s), b.stage(min(s + 1, b.step))
        assert substructure(T, S.universe) == S
        i, f = b.witness(s)
        assert is_embedding(f, b.age.member(i), S) and len(b.age.member(i)) == len(S)


@pytest.mark.parametrize("tag", ["linorders", "graphs", "k1"])
def test_fairness_bound(tag):
    b = grown(tag, 300)
    assert not b.fairness_violations()
    assert all(r.executed <= r.deadline for r in b.records)


def test_contains_small_members():
    b = grown("linorders", 60)
    assert oracles.all_embeddings(chain(3), substructure(b.current, b.current.elements[:8]))


@pytest.mark.parametrize("tag", ["linorders", "graphs"])
def test_decide_E_limit_matches_oracle(tag):
    b = grown(tag, 150)
    pts = b.current.elements[:6]
    for i in range(41):
        M = b.age.member(i)
        if len(M) > 3:
            continue
        for image in itertools.islice(itertools.permutations(pts, len(M)), 40):
            f = PartialMap(zip(M.elements, image))
            assert b.decide_E_limit(i, f) == oracles.embeds(f.as_dict(), M, b.current)
    assert b.decide_E_limit(0, PartialMap())
    collapse = PartialMap({0: pts[0], 1: pts[0]})
    assert not b.decide_E_limit(2, collapse)
    with pytest.raises(RangeNotBuilt):
        b.decide_E_limit(1, PartialMap({0: 10 ** 6}))


@settings(max_examples=40)
@given(st.sampled_from(["linorders", "graphs", "k1"]), st.data())
def test_is_partial_iso_matches_direct(tag, data):
    b = grown(tag, 150)
    pts = b.current.elements[:10]
    dom = data.draw(st.lists(st.sampled_from(pts), min_size=0, max_size=3, unique=True))
    ran = data.draw(st.lists(st.sampled_from(pts), min_size=len(dom), max_size=len(dom),
                             unique=True))
    f = PartialMap(zip(dom, ran))
    want = oracles.partial_iso(b.current, f.as_dict())
    assert b.is_partial_iso(f) == want == is_partial_isomorphism(b.current, f)


def test_dlo_examples():
    b = grown("linorders", 150)
    S = b.current
    a, c = [x for x in S.elements[:2]]
    lo, hi = (a, c) if S.holds("<", a, c) else (c, a)
    assert b.is_partial_iso(PartialMap.identity([lo, hi]))
    assert not b.is_partial_iso(PartialMap({lo: hi, hi: lo}))


@given(st.integers(0, 9), st.integers(0, 9), st.sampled_from(["domain", "range"]))
@settings(max_examples=25)
def test_extend_iso_gives_partial_iso(k, x, side):
    b = new_builder(linear_orders(), 1)
    b.grow(80)
    pts = b.current.elements
    f = PartialMap({pts[k]: pts[(k + 3) % 10]}) if k != (k + 3) % 10 else PartialMap()
    if not b.is_partial_iso(f):
        return
    g = b.extend_iso(f, pts[x], side)
    assert b.is_partial_iso(g)
    assert (pts[x] in g.domain) if side == "domain" else (pts[x] in g.range)
    assert set(f.pairs) <= set(g.pairs)


def test_extend_iso_examples():
    b = new_builder(linear_orders())
    b.grow(60)
    x = b.current.elements[0]
    f = PartialMap({x: x})
    assert b.extend_iso(f, x) == f
    y = b.extend_iso(PartialMap(), x)
    assert len(y) == 1 and b.is_partial_iso(y)


def test_determinism_and_schedule_tokens():
    a, b = new_builder(linear_orders(), 0), new_builder(linear_orders(), 0)
    assert a.grow(100) == b.grow(100)
    c = new_builder(finite_graphs(), 5)
    d = new_builder(finite_graphs(), 0)
    assert c.grow(150) != d.grow(150)
