"""Desk-scale ordinal notations in the style of Kleene's O.

A notation is ``One`` (the notation for 0), ``Succ(a)`` or ``Lim(name)``,
where ``name`` refers to a registered fundamental sequence.  Limit notations
carry no Goedel index; the registry plays the role of the total recursive
function that generates the sequence.

Textual syntax: ``1``, ``s(x)``, ``lim(name)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .errors import HorizonExceeded, NotationSyntaxError, NotLimit

DEFAULT_HORIZON = 64


@dataclass(frozen=True, order=True)
class OrdinalValue:
    """An ordinal below omega squared, written ``omega*omegas + finite``."""

    omegas: int
    finite: int

    def succ(self) -> "OrdinalValue":
        return OrdinalValue(self.omegas, self.finite + 1)

    @property
    def is_limit(self) -> bool:
        return self.finite == 0 and self.omegas > 0

    def __str__(self) -> str:
        if self.omegas == 0:
            return str(self.finite)
        head = "w" if self.omegas == 1 else f"w*{self.omegas}"
        return head if self.finite == 0 else f"{head}+{self.finite}"


@dataclass(frozen=True)
class Notation:
    kind: str  # "one" | "succ" | "lim"
    pred: Optional["Notation"] = None
    seq: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("one", "succ", "lim"):
            raise ValueError(f"bad notation kind {self.kind!r}")

    @property
    def is_one(self) -> bool:
        return self.kind == "one"

    @property
    def is_succ(self) -> bool:
        return self.kind == "succ"

    @property
    def is_lim(self) -> bool:
        return self.kind == "lim"

    def __str__(self) -> str:
        if self.kind == "one":
            return "1"
        if self.kind == "succ":
            return f"s({self.pred})"
        return f"lim({self.seq})"

    def __repr__(self) -> str:
        return f"Notation({self})"


ONE = Notation("one")


def successor(a: Notation) -> Notation:
    return Notation("succ", pred=a)


def iterate_successor(a: Notation, n: int) -> Notation:
    for _ in range(n):
        a = successor(a)
    return a


def finite(n: int) -> Notation:
    """The notation ``s(s(...s(1)))`` for the natural number ``n``."""
    return iterate_successor(ONE, n)


@dataclass(frozen=True)
class FundamentalSequence:
    name: str
    generator: Callable[[int], Notation] = field(compare=False)
    value: OrdinalValue = field(compare=False)

    def __call__(self, n: int) -> Notation:
        return self.generator(n)


class _Registry:
    def __init__(self):
        self._seqs: dict[str, FundamentalSequence] = {}
        self._lock = threading.Lock()

    def register(self, seq: FundamentalSequence) -> FundamentalSequence:
        with self._lock:
            if seq.name in self._seqs:
                raise ValueError(f"fundamental sequence {seq.name!r} already registered")
            self._seqs[seq.name] = seq
        return seq

    def get(self, name: str) -> FundamentalSequence:
        try:
            return self._seqs[name]
        except KeyError:
            raise NotationSyntaxError(f"no fundamental sequence named {name!r}") from None

    def names(self) -> list[str]:
        return sorted(self._seqs)

    def __contains__(self, name: str) -> bool:
        return name in self._seqs


REGISTRY = _Registry()


def register_sequence(name: str, generator: Callable[[int], Notation],
                      value: OrdinalValue) -> Notation:
    REGISTRY.register(FundamentalSequence(name, generator, value))
    return lim(name)


def lim(name: str) -> Notation:
    REGISTRY.get(name)
    return Notation("lim", seq=name)


# omega: n |-> n;  omega*2: 0 |-> 0, n |-> omega+n;  omega*3: 0 |-> 0, n |-> omega*2+n.
# Every term except position 0 of omega has successor form; 1 (the notation
# for zero) is not a limit, so the tower accepts all of them.
OMEGA = register_sequence("omega", finite, OrdinalValue(1, 0))
OMEGA2 = register_sequence(
    "omega2", lambda n: ONE if n == 0 else iterate_successor(OMEGA, n), OrdinalValue(2, 0))
OMEGA3 = register_sequence(
    "omega3", lambda n: ONE if n == 0 else iterate_successor(OMEGA2, n), OrdinalValue(3, 0))


def fundamental_element(a: Notation, n: int) -> Notation:
    if not a.is_lim:
        raise NotLimit(f"{a} is not a limit notation")
    return REGISTRY.get(a.seq)(n)


def ordinal_value(a: Notation) -> OrdinalValue:
    steps = 0
    while a.is_succ:
        steps += 1
        a = a.pred
    base = OrdinalValue(0, 0) if a.is_one else REGISTRY.get(a.seq).value
    return OrdinalValue(base.omegas, base.finite + steps)


def _le(x: Notation, y: Notation, horizon: int) -> bool:
    return x == y or _lt(x, y, horizon)


def _lt(x: Notation, y: Notation, horizon: int) -> bool:
    while True:
        if y.is_one:
            return False
        if y.is_succ:
            if x == y.pred:
                return True
            y = y.pred
            continue
        break
    vx = ordinal_value(x)
    if x == y or vx >= ordinal_value(y):
        return False  # x <_O y forces |x| < |y|
    for n in range(horizon + 1):
        yn = fundamental_element(y, n)
        if _le(x, yn, horizon):
            return True
        # The notations below y_n form a linear path; once that path has
        # passed the value of x without meeting x, x is off every later path.
        if ordinal_value(yn) >= vx:
            return False
    raise HorizonExceeded(f"could not place {x} below {y} within {horizon} terms")


def less(a: Notation, b: Notation, horizon: int = DEFAULT_HORIZON) -> bool:
    """``a <_O b``."""
    return _lt(a, b, horizon)


def compare_O(a: Notation, b: Notation, horizon: int = DEFAULT_HORIZON) -> str:
    """Return ``"less"``, ``"equal"``, ``"greater"`` or ``"incomparable"``."""
    if a == b:
        return "equal"
    if _lt(a, b, horizon):
        return "less"
    if _lt(b, a, horizon):
        return "greater"
    return "incomparable"


def limit_witness(a: Notation, b: Notation, horizon: int = DEFAULT_HORIZON) -> Optional[int]:
    """Least ``n`` with ``a <=_O b(n)`` for a limit notation ``b``, if any."""
    for n in range(horizon + 1):
        if _le(a, fundamental_element(b, n), horizon):
            return n
    return None


def predecessors(a: Notation) -> Iterator[Notation]:
    """Notations strictly below a successor-or-one notation along its path."""
    while a.is_succ:
        a = a.pred
        yield a


def parse_notation(text: str) -> Notation:
    text = text.strip()
    pos = 0

    def parse() -> Notation:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if text.startswith("1", pos):
            pos += 1
            return ONE
        if text.startswith("s(", pos):
            pos += 2
            inner = parse()
            expect(")")
            return successor(inner)
        if text.startswith("lim(", pos):
            pos += 4
            end = text.find(")", pos)
            if end < 0:
                raise NotationSyntaxError(f"unterminated lim( in {text!r}")
            name = text[pos:end].strip()
            pos = end + 1
            return lim(name)
        raise NotationSyntaxError(f"cannot parse notation at {text[pos:]!r}")

    def expect(ch: str) -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if not text.startswith(ch, pos):
            raise NotationSyntaxError(f"expected {ch!r} at position {pos} in {text!r}")
        pos += 1

    result = parse()
    if text[pos:].strip():
        raise NotationSyntaxError(f"trailing input {text[pos:]!r}")
    return result
