"""Shipped ages by tag."""

from __future__ import annotations

from .age import AgeRep, broken_linear_orders, finite_graphs, linear_orders
from .notations import parse_notation

FIXED = {
    "linorders": linear_orders,
    "graphs": finite_graphs,
    "broken-linorders": broken_linear_orders,
}
TOWER_ALIASES = {"k1": "1", "kb": "s(1)"}


def tags() -> list[str]:
    return sorted(FIXED) + sorted(TOWER_ALIASES) + ["tower:<notation>"]


def level_for(tag: str):
    """Tower level named by ``k1``, ``kb`` or ``tower:<notation>``, else None."""
    from .tower import I
    if tag in TOWER_ALIASES:
        return I(TOWER_ALIASES[tag])
    if tag.startswith("tower:"):
        return I(parse_notation(tag[len("tower:"):]))
    return None


def get_age(tag: str) -> AgeRep:
    if tag in FIXED:
        return FIXED[tag]()
    level = level_for(tag)
    if level is None:
        raise KeyError(f"unknown age {tag!r}; known: {', '.join(tags())}")
    return level.age
