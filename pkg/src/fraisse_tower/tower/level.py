"""The record describing one level of the tower."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..age import AgeRep
from ..fraisse import LimitBuilder, new_builder
from ..notations import Notation
from ..structures import FinStructure, Vocabulary

# (structure, element to insert just above or None for the bottom) -> (structure, new element)
InsertU = Callable[[FinStructure, Optional[int]], "tuple[FinStructure, int]"]


@dataclass(eq=False)
class TowerLevel:
    notation: Notation
    vocabulary: Vocabulary
    age: AgeRep
    u: str
    lt: str
    insert_u: InsertU
    validate: Callable[[FinStructure], list]
    distinguished: dict = field(default_factory=dict)
    lower: Optional["TowerLevel"] = None
    smoke: Optional[tuple[int, int]] = (2, 6)
    _builder: Optional[LimitBuilder] = field(default=None, repr=False)

    @property
    def builder(self) -> LimitBuilder:
        """The limit approximant, created on first use."""
        if self._builder is None:
            self._builder = new_builder(self.age, smoke=self.smoke)
        return self._builder

    def new_builder(self, schedule_id: int = 0, **kw) -> LimitBuilder:
        kw.setdefault("smoke", self.smoke)
        return new_builder(self.age, schedule_id=schedule_id, **kw)

    def is_member(self, S: FinStructure) -> bool:
        return not self.validate(S)

    def __repr__(self) -> str:
        return f"<TowerLevel {self.notation}>"


def tagged(stem: str, notation: Notation) -> str:
    return f"{stem}[{notation}]"
