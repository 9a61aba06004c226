"""JSON and DOT serialization of finite structures.

JSON layout::

    {"vocabulary": [{"name": "<", "arity": 2, "mark": "1"}, ...],
     "universe": [0, 1, 2],
     "relations": {"<": [[0, 1], [0, 2], [1, 2]]}}

For infinite vocabularies only the realized symbols are listed.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .errors import VocabularyMismatch
from .notations import parse_notation
from .structures import FinStructure, Symbol, Vocabulary


def _symbols_for(A: FinStructure) -> list[Symbol]:
    voc = A.vocabulary
    if voc.is_finite:
        return sorted(voc.finite_symbols(), key=lambda s: s.name)
    return [voc.lookup(name) for name in A.realized()]


def encode(A: FinStructure) -> dict[str, Any]:
    return {
        "vocabulary_name": A.vocabulary.name,
        "vocabulary": [{"name": s.name, "arity": s.arity, "mark": str(s.mark)}
                       for s in _symbols_for(A)],
        "universe": A.elements,
        "relations": {name: sorted(list(t) for t in A.relation(name)) for name in A.realized()},
    }


def decode(data: dict[str, Any], vocabulary: Optional[Vocabulary] = None) -> FinStructure:
    """Rebuild a structure.

    With ``vocabulary`` given, the listed symbols are checked against it and
    the result shares that vocabulary object; otherwise a fresh finite
    vocabulary is built from the listing.
    """
    listed = [Symbol(s["name"], int(s["arity"]), parse_notation(str(s.get("mark", "1"))))
              for s in data.get("vocabulary", [])]
    if vocabulary is None:
        vocabulary = Vocabulary(data.get("vocabulary_name", "decoded"), listed)
    else:
        for sym in listed:
            known = vocabulary.find(sym.name)
            if known is None or known.arity != sym.arity:
                raise VocabularyMismatch(f"symbol {sym.name}/{sym.arity} not in {vocabulary.name}")
    rel = {name: [tuple(t) for t in ts] for name, ts in data.get("relations", {}).items()}
    return FinStructure(vocabulary, data.get("universe", []), rel)


def dumps(A: FinStructure) -> str:
    return json.dumps(encode(A), sort_keys=True)


def loads(text: str, vocabulary: Optional[Vocabulary] = None) -> FinStructure:
    return decode(json.loads(text), vocabulary)


def to_dot(A: FinStructure, name: str = "structure") -> str:
    """Graphviz rendering: binary relations as labelled edges, unary ones as node labels."""
    lines = [f"digraph {json.dumps(name)} {{"]
    for x in A.elements:
        labels = [n for n in A.realized() if A.vocabulary.arity(n) == 1 and A.holds(n, x)]
        label = f"{x}" + (f"\\n{' '.join(labels)}" if labels else "")
        lines.append(f'  {x} [label="{label}"];')
    for n in A.realized():
        if A.vocabulary.arity(n) != 2:
            continue
        for s, t in sorted(A.relation(n)):
            lines.append(f"  {s} -> {t} [label={json.dumps(n)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
