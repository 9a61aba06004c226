"""The tower of ages indexed by ordinal notations."""

from .base import build_base
from .level import TowerLevel
from .limit import build_limit
from .recursion import I
from .successor import build_successor, validate_Kb

__all__ = ["TowerLevel", "build_base", "build_successor", "build_limit", "I", "validate_Kb"]
