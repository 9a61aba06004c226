import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fraisse_tower.age import check_age_axioms
from fraisse_tower.errors import AmalgamFailed, NotLimit, PreconditionFailed, VocabularyMismatch
from fraisse_tower.notations import lim, parse_notation, register_sequence, OrdinalValue, finite
from fraisse_tower.structures import PartialMap, is_embedding
from fraisse_tower.tower import I, build_base, validate_Kb
from fraisse_tower.tower.base import rational_structure
from fraisse_tower.tower.coloring import Fresh, complete_coloring, star_violations

P = frozenset


# -- the colouring law -------------------------------------------------------------------


def materialize(colour, assignment, anchors):
    """Numeric colours: each fresh token sits just above its anchor, below everything else."""
    values = sorted(set(colour.values()))
    made = []
    for anchor in anchors:
        if anchor is None:
            v = (min(values) - 1) if values else 0.0
        else:
            at = made[anchor.k] if isinstance(anchor, Fresh) else anchor
            above = [x for x in values if x > at]
            v = (at + above[0]) / 2 if above else at + 1
        values = sorted(values + [v])
        made.append(v)
    full = dict(colour)
    for e, c in assignment.items():
        full[e] = made[c.k] if isinstance(c, Fresh) else c
    return full


@st.composite
def partial_colourings(draw, max_vertices=5):
    n = draw(st.integers(0, max_vertices))
    vs = list(range(n))
    colour = {}
    for e in itertools.combinations(vs, 2):
        if draw(st.integers(0, 2)):
            colour[P(e)] = draw(st.integers(0, 3))
            if not oracles.star_ok(vs, colour):
                del colour[P(e)]
    return vs, colour


def oracle_values(colour):
    base = sorted(set(colour.values())) or [0]
    vals = set(base)
    for lo, hi in zip([base[0] - 1] + base, base + [base[-1] + 1]):
        vals.update(lo + (hi - lo) * k / 4 for k in (1, 2, 3))
    return sorted(vals)


@settings(max_examples=150)
@given(partial_colourings(max_vertices=4))
def test_completion_matches_brute_force(case):
    vs, colour = case
    rank = {c: c for c in colour.values()}
    try:
        assignment, anchors = complete_coloring(vs, colour, rank)
    except AmalgamFailed:
        assert not oracles.star_completable(vs, colour, oracle_values(colour))
        return
    full = materialize(colour, assignment, anchors)
    assert len(full) == len(vs) * (len(vs) - 1) // 2
    assert oracles.star_ok(vs, full)


@given(partial_colourings(max_vertices=6))
def test_star_violations_matches_oracle(case):
    vs, colour = case
    rnd = random.Random(len(colour))
    for e in itertools.combinations(vs, 2):
        if P(e) not in colour and rnd.random() < 0.5:
            colour[P(e)] = rnd.randrange(4)
    rank = {c: c for c in colour.values()}
    assert (not star_violations(vs, colour, rank)) == oracles.star_ok(vs, colour)


def test_some_partial_colourings_cannot_be_completed():
    # a-b = 1, b-c = c-d = a-d = 3: no fully coloured triangle, yet no completion
    a, b, c, d = range(4)
    colour = {P((a, b)): 1, P((b, c)): 3, P((c, d)): 3, P((a, d)): 3}
    assert oracles.star_ok(range(4), colour)
    with pytest.raises(AmalgamFailed):
        complete_coloring(range(4), colour, {1: 1, 3: 3})
    assert not oracles.star_completable(range(4), colour, oracle_values(colour))


# -- level 1 ----------------------------------------------------------------------------


def test_base_level():
    level = I("1")
    M = level.age.member(level.age.locate(rational_structure([Fraction(1, 2)]))[0])
    assert len(M) == 1 and M.holds("Q[1/2]", 0)
    assert check_age_axioms(level.age, 2, 50).ok
    assert level.validate(rational_structure([0, 1, Fraction(1, 2)]))  == []
    assert level.validate(rational_structure([0, 0]))


# -- successor level ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def kb():
    return I("s(1)")


def test_successor_vocabulary(kb):
    names = kb.distinguished
    arities = {k: kb.vocabulary.arity(names[k]) for k in ("V", "M", "U", "P", "F", "<")}
    assert arities == {"V": 1, "M": 1, "U": 1, "P": 2, "F": 3, "<": 2}
    assert kb.vocabulary.arity("Q[3]") == 1


def test_successor_members_valid(kb):
    for i in range(200):
        assert validate_Kb(kb, kb.age.member(i)) == []


@settings(max_examples=30)
@given(st.integers(0, 400))
def test_successor_locate_round_trip(kb, i):
    M = kb.age.member(i)
    j, h = kb.age.locate(M)
    assert is_embedding(h, kb.age.member(j), M) and len(kb.age.member(j)) == len(M)


def test_successor_decider_matches_oracle(kb):
    K = kb.age
    idx = [i for i in range(60) if len(K.member(i)) <= 3][:12]
    for i, j in itertools.product(idx, repeat=2):
        A, B = K.member(i), K.member(j)
        for image in itertools.permutations(B.elements, len(A)):
            f = PartialMap(zip(A.elements, image))
            assert K.decide_embedding(i, j, f) == oracles.embeds(f.as_dict(), A, B)


def test_validate_rejects_foreign_vocabulary(kb):
    with pytest.raises(VocabularyMismatch):
        validate_Kb(kb, rational_structure([0]))


def _kb_structure(kb, rationals, V, U_order, P_, F):
    K = kb.successor_age
    MS = rational_structure([q for _, q in rationals], [x for x, _ in rationals])
    return K.assemble(MS, V, U_order, P_, F)


def test_amalgamation_fails_over_rigid_colours(kb):
    """Two colour points naming the same rational must merge, closing an equilateral triangle."""
    K = kb.successor_age
    A = _kb_structure(kb, [(0, 0)], [1, 2], [], {}, {P((1, 2)): 0})
    B = _kb_structure(kb, [(3, 0)], [1, 2, 4], [], {}, {P((4, 1)): 3, P((4, 2)): 3})
    assert validate_Kb(kb, A) == [] and validate_Kb(kb, B) == []
    with pytest.raises(AmalgamFailed):
        K.amalgam(A, B, PartialMap({1: 1, 2: 2}))
    # any amalgam must identify 3 with 0, since one point per rational is allowed ...
    assert build_base().validate(rational_structure([0, 0], [0, 3]))
    # ... and the identified structure breaks the star law
    D = _kb_structure(kb, [(0, 0)], [1, 2, 4], [], {},
                      {P((1, 2)): 0, P((4, 1)): 0, P((4, 2)): 0})
    assert any(m.startswith("(7)") for m in validate_Kb(kb, D))


def test_shared_vertex_forces_p_values_together(kb):
    K = kb.successor_age
    A = _kb_structure(kb, [], [1], [5], {1: 5}, {})
    B = _kb_structure(kb, [], [1], [6], {1: 6}, {})
    D, fa, fb = K.amalgam(A, B, PartialMap({1: 1}))
    assert validate_Kb(kb, D) == [] and fb(6) == 5
    # the forced identification can contradict the order on U
    A = _kb_structure(kb, [], [1], [5, 7], {1: 5}, {})
    B = _kb_structure(kb, [], [1], [7, 6], {1: 6}, {})
    with pytest.raises(AmalgamFailed):
        K.amalgam(A, B, PartialMap({1: 1, 7: 7}))


def test_successor_axioms_small(kb):
    report = check_age_axioms(kb.age, 3, 20)
    assert report.ok


def test_successor_builder_stays_valid(kb):
    b = kb.new_builder(0)
    for _ in range(4):
        b.grow(40)
        assert validate_Kb(kb, b.current) == []
    assert not b.failures


def test_second_successor_builds():
    level = I("s(s(1))")
    assert validate_Kb(level, level.age.member(77)) == []
    b = level.new_builder(0)
    b.grow(60)
    assert level.validate(b.current) == []


# -- limit level ----------------------------------------------------------------------------


def test_limit_members_obey_order_law():
    level = I("lim(omega)")
    la = level.limit_age
    for i in range(0, 4000, 97):
        M = level.age.member(i)
        assert level.validate(M) == []
        assert set(M.relation(la.lt)) == la.order_law(M)


def test_limit_builder_and_locate():
    level = I("lim(omega)")
    b = level.new_builder(0)
    b.grow(80)
    assert level.validate(b.current) == []
    for i in (0, 5, 300):
        M = level.age.member(i)
        j, h = level.age.locate(M)
        assert is_embedding(h, level.age.member(j), M)


def test_recursion_memo_and_errors():
    assert I("s(1)") is I(parse_notation("s(1)"))
    bad = register_sequence("has-limit-terms", lambda n: lim("omega") if n == 1 else finite(n),
                            OrdinalValue(1, 0))
    with pytest.raises(PreconditionFailed):
        I(bad)
    with pytest.raises(NotLimit):
        from fraisse_tower.tower.limit import LimitAge
        LimitAge(finite(2), lambda n: I(finite(n)), 2)
