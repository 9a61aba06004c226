import itertools

import pytest
from hypothesis import given, strategies as st

import oracles
from fraisse_tower.age import (AmalgamCertificate, broken_linear_orders, chain, check_age_axioms,
                               finite_graphs, linear_orders, search_amalgam)
from fraisse_tower.errors import BudgetExhausted, PreconditionFailed
from fraisse_tower.structures import PartialMap, is_embedding
from fraisse_tower.tower import build_base

AGES = {"linorders": linear_orders, "graphs": finite_graphs, "k1": lambda: build_base().age}


def small_maps(A, B):
    for image in itertools.permutations(B.elements, len(A)):
        yield PartialMap(zip(A.elements, image))


@pytest.mark.parametrize("tag", sorted(AGES))
def test_decider_matches_oracle(tag):
    K = AGES[tag]()
    idx = [i for i in range(41) if len(K.member(i)) <= 3][:14]
    for i, j in itertools.product(idx, repeat=2):
        A, B = K.member(i), K.member(j)
        for f in small_maps(A, B):
            assert K.decide_embedding(i, j, f) == oracles.embeds(f.as_dict(), A, B), (i, j, f)


@pytest.mark.parametrize("tag", sorted(AGES))
def test_members_are_valid_and_total(tag):
    K = AGES[tag]()
    for i in range(60):
        M = K.member(i)
        assert not K.violations(M)
        j, h = K.index_of(M)
        assert is_embedding(h, K.member(j), M) and len(K.member(j)) == len(M)
        if len(M) <= 5:
            assert oracles.isomorphic(K.member(j), M)


def test_member_examples():
    K = linear_orders()
    assert len(K.member(0)) == 0 and K.member(2) == chain(2)
    assert K.decide_embedding(0, 3, PartialMap())
    assert K.decide_embedding(2, 3, PartialMap({0: 0, 1: 2}))
    assert not K.decide_embedding(2, 3, PartialMap({0: 1, 1: 0}))


def test_axioms_hold_for_shipped_ages():
    assert check_age_axioms(linear_orders(), 3, 50).ok
    assert check_age_axioms(finite_graphs(), 3, 40).ok
    assert check_age_axioms(build_base().age, 2, 50).ok


def test_broken_age_fails_hp():
    report = check_age_axioms(broken_linear_orders(), 3, 10)
    assert report.hp and not report.ok
    assert any(line["axiom"] == "HP" and line["counterexamples"] != "none found"
               for line in report.lines())


def test_amalgam_examples():
    K = linear_orders()
    cert = search_amalgam(K, 1, 1, 0, PartialMap(), PartialMap())
    assert len(cert.D) == 2 and cert.validate(K, 1, 1, 0, PartialMap(), PartialMap())
    # C = {c}, A = {a < c}, B = {c < b}
    f, g = PartialMap({0: 1}), PartialMap({0: 0})
    cert = search_amalgam(K, 2, 2, 1, f, g)
    assert cert.validate(K, 2, 2, 1, f, g) and len(cert.D) == 3
    ident = PartialMap.identity(range(3))
    cert = search_amalgam(K, 3, 3, 3, ident, ident)
    assert len(cert.D) == 3


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3), st.randoms())
def test_certificates_validate(a, b, c, rnd):
    K = finite_graphs()
    c = min(c, a, b)
    A, B, C = K.member(a + 60), K.member(b + 60), K.member(c)
    fs = [f for f in small_maps(C, A) if is_embedding(f, C, A)]
    gs = [g for g in small_maps(C, B) if is_embedding(g, C, B)]
    if not fs or not gs:
        return
    f, g = rnd.choice(fs), rnd.choice(gs)
    cert = search_amalgam(K, a + 60, b + 60, c, f, g)
    assert cert.validate(K, a + 60, b + 60, c, f, g)
    assert search_amalgam(K, a + 60, b + 60, c, f, g) == cert


def test_amalgam_preconditions_and_budget():
    K = linear_orders()
    with pytest.raises(PreconditionFailed):
        search_amalgam(K, 2, 2, 1, PartialMap({0: 5}), PartialMap({0: 0}))
    with pytest.raises(BudgetExhausted):
        search_amalgam(K, 3, 3, 0, PartialMap(), PartialMap(), budget=1, use_hook=False)
    assert isinstance(search_amalgam(K, 1, 2, 0, PartialMap(), PartialMap(), use_hook=False),
                      AmalgamCertificate)
