import itertools

import pytest
from hypothesis import given, strategies as st

from fraisse_tower.errors import HorizonExceeded, NotationSyntaxError, NotLimit
from fraisse_tower.notations import (ONE, OMEGA, OMEGA2, OMEGA3, REGISTRY, compare_O, finite,
                                     fundamental_element, iterate_successor, less,
                                     limit_witness, ordinal_value, parse_notation, successor)

SHIPPED = [finite(n) for n in range(5)] + [OMEGA, successor(OMEGA), OMEGA2,
                                           iterate_successor(OMEGA2, 2), OMEGA3]


def test_successor_values():
    assert str(ordinal_value(successor(ONE))) == "1"
    assert str(ordinal_value(successor(successor(ONE)))) == "2"
    assert str(ordinal_value(successor(OMEGA))) == "w+1"


def test_compare_examples():
    assert compare_O(ONE, successor(ONE)) == "less"
    assert compare_O(OMEGA, OMEGA) == "equal"
    assert compare_O(finite(3), OMEGA) == "less"
    assert limit_witness(finite(3), OMEGA) == 3
    assert compare_O(OMEGA2, finite(2)) == "greater"


def test_fundamental_elements():
    assert fundamental_element(OMEGA, 2) == finite(2)
    assert fundamental_element(OMEGA2, 1) == successor(OMEGA)
    with pytest.raises(NotLimit):
        fundamental_element(successor(ONE), 0)


@pytest.mark.parametrize("a", [OMEGA, OMEGA2, OMEGA3])
def test_sequences_increase(a):
    terms = [fundamental_element(a, n) for n in range(21)]
    assert all(less(x, y) for x, y in zip(terms, terms[1:]))


def test_strict_partial_order_on_shipped():
    for a in SHIPPED:
        assert not less(a, a)
    for a, b in itertools.permutations(SHIPPED, 2):
        assert not (less(a, b) and less(b, a))
    for a, b, c in itertools.permutations(SHIPPED, 3):
        if less(a, b) and less(b, c):
            assert less(a, c)


@given(st.integers(0, 30))
def test_value_of_successor(n):
    for base in (ONE, OMEGA, OMEGA2):
        a = iterate_successor(base, n)
        assert ordinal_value(successor(a)) == ordinal_value(a).succ()


@given(st.sampled_from(SHIPPED))
def test_parse_round_trip(a):
    assert parse_notation(str(a)) == a


def test_parse_errors():
    for bad in ("s(1", "lim(", "2", "s(1))", "lim(nope)x"):
        with pytest.raises(NotationSyntaxError):
            parse_notation(bad)
    with pytest.raises(NotationSyntaxError):
        REGISTRY.get("nope")


def test_horizon_exhaustion_is_reported():
    with pytest.raises(HorizonExceeded):
        compare_O(finite(10), OMEGA, horizon=3)
