from fractions import Fraction

from hypothesis import given, strategies as st

from fraisse_tower import codec

nats = st.integers(0, 10 ** 6)


@given(nats, nats)
def test_pairing_round_trip(x, y):
    assert codec.unpair(codec.pair(x, y)) == (x, y)


@given(nats)
def test_unpair_is_total(z):
    assert codec.pair(*codec.unpair(z)) == z


@given(st.lists(st.integers(0, 500), max_size=12))
def test_naturals_round_trip(xs):
    assert codec.decode_naturals(codec.encode_naturals(xs)) == xs


@given(nats)
def test_naturals_decoder_total(code):
    assert all(x >= 0 for x in codec.decode_naturals(code))


@given(st.fractions())
def test_rational_round_trip(q):
    assert codec.decode_rational(codec.encode_rational(q)) == q


@given(st.sets(st.fractions(max_denominator=20), max_size=6))
def test_rational_set_round_trip(qs):
    assert codec.decode_rational_set(codec.encode_rational_set(qs)) == sorted(qs)


@given(st.permutations(list(range(6))))
def test_lehmer_round_trip(perm):
    assert codec.lehmer_decode(codec.lehmer_encode(perm), 6) == list(perm)


def test_zigzag_examples():
    assert [codec.zigzag(n) for n in (0, -1, 1, -2)] == [0, 1, 2, 3]
    assert codec.decode_rational(codec.encode_rational(Fraction(-3, 4))) == Fraction(-3, 4)
