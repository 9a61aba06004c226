from hypothesis import given, settings, strategies as st

import oracles
from conftest import ur_structures
from fraisse_tower.age import chain
from fraisse_tower.games import ef_equivalent


@settings(max_examples=80)
@given(ur_structures(max_size=3), ur_structures(max_size=3), st.integers(0, 3))
def test_matches_game_tree_search(A, B, depth):
    assert ef_equivalent(A, B, depth) == oracles.ef_game(A, B, depth)


def test_chains():
    assert ef_equivalent(chain(7), chain(8), 3)
    assert not ef_equivalent(chain(6), chain(7), 3)
    assert ef_equivalent(chain(3), chain(4), 2)
    assert not ef_equivalent(chain(3), chain(4), 3)


@given(ur_structures(max_size=4))
def test_isomorphic_copies_are_equivalent(A):
    B = A.relabel({x: x + 50 for x in A.elements})
    assert ef_equivalent(A, B, 3)
