"""Total codings of finite data by natural numbers.

Every decoder here is total: any natural number decodes to *some* value, so
enumerations built on top of them never have holes.  Encoders are exact
inverses on their image (``decode(encode(x)) == x``).
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence


def pair(x: int, y: int) -> int:
    """Cantor pairing of two naturals."""
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def _gamma(n: int) -> str:
    # Elias gamma code of n >= 1
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def encode_naturals(seq: Iterable[int]) -> int:
    bits = "1" + "".join(_gamma(n + 1) for n in seq)
    return int(bits, 2)


def decode_naturals(code: int) -> list[int]:
    if code <= 1:
        return []
    bits = bin(code)[3:]
    out = []
    pos = 0
    while pos < len(bits):
        zeros = 0
        while pos + zeros < len(bits) and bits[pos + zeros] == "0":
            zeros += 1
        end = pos + 2 * zeros + 1
        if end > len(bits):
            break  # incomplete tail is ignored
        out.append(int(bits[pos + zeros:end], 2) - 1)
        pos = end
    return out


def zigzag(n: int) -> int:
    return 2 * n if n >= 0 else -2 * n - 1


def unzigzag(k: int) -> int:
    return k // 2 if k % 2 == 0 else -(k + 1) // 2


def encode_rational(q: Fraction) -> int:
    q = Fraction(q)
    return pair(zigzag(q.numerator), q.denominator - 1)


def decode_rational(code: int) -> Fraction:
    num, den = unpair(code)
    return Fraction(unzigzag(num), den + 1)


def encode_set(codes: Iterable[int]) -> int:
    """Code a finite set of naturals as the gap sequence of its sorted list."""
    gaps = []
    prev = -1
    for c in sorted(set(codes)):
        gaps.append(c - prev - 1)
        prev = c
    return encode_naturals(gaps)


def decode_set(code: int) -> list[int]:
    out = []
    prev = -1
    for gap in decode_naturals(code):
        prev = prev + gap + 1
        out.append(prev)
    return out


def encode_rational_set(qs: Iterable[Fraction]) -> int:
    return encode_set(encode_rational(q) for q in qs)


def decode_rational_set(code: int) -> list[Fraction]:
    return sorted({decode_rational(c) for c in decode_set(code)})


def lehmer_encode(perm: Sequence[int]) -> int:
    """Rank of a permutation of ``range(len(perm))`` in factorial base."""
    items = sorted(perm)
    rank = 0
    for x in perm:
        k = items.index(x)
        rank = rank * len(items) + k
        items.pop(k)
    return rank


def lehmer_decode(rank: int, n: int) -> list[int]:
    """Inverse of :func:`lehmer_encode`; ranks are reduced modulo ``n!``."""
    digits = []
    for radix in range(1, n + 1):
        digits.append(rank % radix)
        rank //= radix
    digits.reverse()
    items = list(range(n))
    return [items.pop(d) for d in digits]
