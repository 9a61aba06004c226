"""Edge colourings obeying the star law.

A colouring of pairs of vertices by a linearly ordered set obeys the law
when, in every fully coloured triangle, the two smallest colours agree and
the third is strictly larger.  Total colourings of this kind are exactly the
binary hierarchies: split the vertices in two, give every cross pair one
colour, and recurse into both halves with strictly larger colours.

:func:`complete_coloring` fills in a partial colouring along that recursion.
At each split it reuses the least colour already present when it can and
otherwise asks for a fresh colour just above the split above it.
"""

from __future__ import annotations

from typing import Hashable, NamedTuple

import numpy as np

from ..errors import AmalgamFailed

Pair = frozenset


def star_violations(vertices, colour: dict, rank: dict, pivots=None) -> list[tuple]:
    """Fully coloured triangles breaking the law, as sorted vertex triples.

    ``colour`` maps a pair ``frozenset({v, w})`` to a colour, ``rank`` maps a
    colour to its position in the colour order.  With ``pivots`` only
    triangles through at least one pivot are examined.
    """
    verts = sorted(vertices)
    n = len(verts)
    if n < 3:
        return []
    pos = {v: k for k, v in enumerate(verts)}
    C = np.full((n, n), -1, dtype=np.int64)
    for e, c in colour.items():
        v, w = tuple(e)
        if v in pos and w in pos:
            C[pos[v], pos[w]] = C[pos[w], pos[v]] = rank[c]
    defined = C >= 0
    bad = set()
    centres = range(n) if pivots is None else sorted({pos[v] for v in pivots if v in pos})
    for x in centres:
        r = C[x]
        live = np.nonzero(defined[x])[0]
        if pivots is None:
            live = live[live > x]
        if len(live) < 2:
            continue
        sub = C[np.ix_(live, live)]
        rx = r[live]
        ry, rz = rx[:, None], rx[None, :]
        mask = (sub >= 0) & np.triu(np.ones_like(sub, dtype=bool), k=1)
        lo = np.minimum(ry, rz)
        hi = np.maximum(ry, rz)
        # sorted colours lo <= hi and the third; valid iff two smallest equal, third larger
        third = sub
        ok = ((lo == hi) & (third > lo)) | ((lo < hi) & (third == lo))
        for a, b in zip(*np.nonzero(mask & ~ok)):
            bad.add(tuple(sorted((verts[x], verts[live[a]], verts[live[b]]))))
    return sorted(bad)


class Fresh(NamedTuple):
    """Index of a colour that does not exist yet."""

    k: int


def complete_coloring(vertices, colour: dict, rank: dict):
    """Extend ``colour`` to every pair of ``vertices`` so the law holds.

    Returns ``(assignment, anchors)``.  ``assignment`` maps each previously
    uncoloured pair to an existing colour or to a :class:`Fresh` token;
    ``anchors[k]`` says where token ``k`` goes: just above the existing colour
    or token it names, or at the very bottom when None.  Tokens are listed so
    that every anchor precedes the tokens placed above it.

    Raises AmalgamFailed when no completion exists.
    """
    nbr: dict[Hashable, dict] = {v: {} for v in vertices}
    for e, c in colour.items():
        v, w = tuple(e)
        if v in nbr and w in nbr:
            nbr[v][w] = c
            nbr[w][v] = c
    assignment: dict = {}
    anchors: list = []

    def fresh(anchor) -> Fresh:
        anchors.append(anchor)
        return Fresh(len(anchors) - 1)

    def given_pairs(W):
        ws = set(W)
        for v in W:
            for w, c in nbr[v].items():
                if w in ws and v < w:
                    yield v, w, c

    def components(W, edges):
        parent = {v: v for v in W}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for v, w in edges:
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[rv] = rw
        comps: dict = {}
        for v in W:
            comps.setdefault(find(v), []).append(v)
        return comps, find

    def split(side0, side1, value, lb_next):
        for v in side0:
            for w in side1:
                if w not in nbr[v]:
                    assignment[Pair((v, w))] = value
        solve(side0, lb_next)
        solve(side1, lb_next)

    def solve(W: list, lb) -> None:
        if len(W) < 2:
            return
        given = list(given_pairs(W))
        if len(given) == len(W) * (len(W) - 1) // 2:
            return
        if given:
            cmin = min((c for _, _, c in given), key=rank.__getitem__)
            r = rank[cmin]
            comps, find = components(W, [(v, w) for v, w, c in given if rank[c] != r])
            adj: dict = {k: set() for k in comps}
            for v, w, c in given:
                if rank[c] == r:
                    a, b = find(v), find(w)
                    if a == b:
                        break
                    adj[a].add(b)
                    adj[b].add(a)
            else:
                side = {}
                ok = True
                for start in comps:
                    if start in side or not adj[start]:
                        continue
                    side[start] = 0
                    stack = [start]
                    while stack and ok:
                        k = stack.pop()
                        for m in adj[k]:
                            if m not in side:
                                side[m] = 1 - side[k]
                                stack.append(m)
                            elif side[m] == side[k]:
                                ok = False
                                break
                if ok:
                    side0 = [v for k, vs in comps.items() if side.get(k, 0) == 0 for v in vs]
                    side1 = [v for k, vs in comps.items() if side.get(k, 0) == 1 for v in vs]
                    split(sorted(side0), sorted(side1), cmin, cmin)
                    return
            comps, _ = components(W, [(v, w) for v, w, _ in given])
            if len(comps) < 2:
                raise AmalgamFailed(f"colouring of {sorted(W)} cannot be completed")
            groups = sorted(comps.values(), key=min)
            side0, side1 = groups[0], [v for g in groups[1:] for v in g]
        else:
            half = len(W) // 2
            side0, side1 = W[:half], W[half:]
        token = fresh(lb)
        split(sorted(side0), sorted(side1), token, token)

    solve(sorted(vertices), None)
    return assignment, anchors

