"""The level function ``I``, by recursion on notations."""

from __future__ import annotations

import threading

from ..errors import PreconditionFailed
from ..notations import Notation, fundamental_element, parse_notation
from .base import build_base
from .level import TowerLevel
from .limit import build_limit
from .successor import build_successor

DEFAULT_HORIZON = 3

_memo: dict[tuple[str, int], TowerLevel] = {}
_lock = threading.RLock()


def _sequence_level(a: Notation, horizon: int):
    def level_of(n: int) -> TowerLevel:
        x = fundamental_element(a, n)
        if x.is_lim:
            raise PreconditionFailed(
                f"term {n} of {a} is the limit notation {x}; sequences must avoid limits")
        return I(x, horizon)
    return level_of


def I(a: Notation | str, horizon: int = DEFAULT_HORIZON) -> TowerLevel:
    """The tower level for ``a``; built once per (notation, horizon) and shared."""
    if isinstance(a, str):
        a = parse_notation(a)
    key = (str(a), horizon)
    with _lock:
        level = _memo.get(key)
        if level is not None:
            return level
        if a.is_one:
            level = build_base()
        elif a.is_succ:
            level = build_successor(I(a.pred, horizon))
        else:
            level = build_limit(a, _sequence_level(a, horizon), horizon)
        return _memo.setdefault(key, level)


def clear_memo() -> None:
    with _lock:
        _memo.clear()
