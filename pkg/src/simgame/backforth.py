"""Back-and-forth families of partial isomorphisms with bounded challenges.

Level 0 holds every partial isomorphism.  A map survives to level k+1 when
every challenge of at most theta elements, taken on either side, can be
covered by some level-k map extending it.  As in the game, theta bounds the
challenge and not the map: a map that already covers a lot must still be
extendable, which keeps identity maps alive at every level.

Maps are encoded as tuples ``g`` over the first universe with ``g[i]`` the
index of the image of element ``i`` or -1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Tuple, Union

from .game import BudgetExceeded, DEFAULT_NODE_BUDGET, board_for
from .structure import PartialMap, Structure, StructureError, partial_map

STABLE = "stable"


@dataclass(frozen=True)
class KarpLevel:
    gamma: int
    maps: FrozenSet[PartialMap]

    def __len__(self):
        return len(self.maps)

    def __contains__(self, f):
        return partial_map(f) in self.maps

    def to_json(self) -> dict:
        return {"gamma": self.gamma,
                "maps": sorted(sorted([a, b] for a, b in f) for f in self.maps)}


class KarpHierarchy:
    """Levels 0..n of the family for one pair of structures.

    ``rank`` is the first level equal to its successor, or None when the
    computation stopped at ``up_to`` before reaching it.
    """

    def __init__(self, m0: Structure, m1: Structure, theta: int, encoded: List[FrozenSet[tuple]],
                 rank: Optional[int]):
        self.m0, self.m1, self.theta = m0, m1, theta
        self.encoded = encoded
        self.rank = rank

    def _index(self, gamma: int) -> int:
        if gamma < len(self.encoded):
            return gamma
        if self.rank is None:
            raise ValueError(f"level {gamma} was not computed")
        return self.rank

    def level_encoded(self, gamma: int) -> FrozenSet[tuple]:
        return self.encoded[self._index(gamma)]

    def level(self, gamma: int) -> KarpLevel:
        u0, u1 = self.m0.universe, self.m1.universe
        maps = frozenset(frozenset((u0[i], u1[j]) for i, j in enumerate(g) if j >= 0)
                         for g in self.level_encoded(gamma))
        return KarpLevel(gamma, maps)

    @property
    def levels(self) -> List[KarpLevel]:
        return [self.level(k) for k in range(len(self.encoded))]

    def to_json(self) -> dict:
        return {"theta": self.theta, "rank": self.rank, "levels": [lv.to_json() for lv in self.levels]}


def _all_partial_isos(board) -> List[tuple]:
    out = []
    g = [-1] * board.n0
    used = [False] * board.n1

    def rec(i):
        if i == board.n0:
            out.append(tuple(g))
            return
        rec(i + 1)
        for j in range(board.n1):
            if not used[j] and board.compatible(g, i, j):
                g[i] = j
                used[j] = True
                rec(i + 1)
                used[j] = False
                g[i] = -1

    rec(0)
    return out


def _extensions(board, f: tuple, new0: Iterable[int], new1: Iterable[int]):
    """Minimal extensions of ``f`` whose domain covers new0 and whose range covers new1."""
    g = list(f)
    used = [False] * board.n1
    for j in f:
        if j >= 0:
            used[j] = True
    new0 = list(new0)
    new1 = list(new1)

    def back(k):
        if k == len(new1):
            yield tuple(g)
            return
        b = new1[k]
        for a in range(board.n0):
            if g[a] < 0 and board.compatible(g, a, b):
                g[a] = b
                used[b] = True
                yield from back(k + 1)
                used[b] = False
                g[a] = -1

    def forth(k):
        if k == len(new0):
            yield from back(0)
            return
        a = new0[k]
        for b in range(board.n1):
            if not used[b] and board.compatible(g, a, b):
                g[a] = b
                used[b] = True
                yield from forth(k + 1)
                used[b] = False
                g[a] = -1

    yield from forth(0)


def _refine(board, theta: int, level: FrozenSet[tuple], budget: List[int]) -> FrozenSet[tuple]:
    keep = set()
    for f in level:
        free0 = [i for i, j in enumerate(f) if j < 0]
        ran = set(j for j in f if j >= 0)
        free1 = [j for j in range(board.n1) if j not in ran]
        ok = True
        # smaller challenges are covered by whatever covers a larger one
        challenges = itertools.chain(
            ((c, ()) for c in itertools.combinations(free0, min(theta, len(free0)))),
            (((), c) for c in itertools.combinations(free1, min(theta, len(free1)))))
        for c0, c1 in challenges:
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceeded(budget[1])
            if not any(g in level for g in _extensions(board, f, c0, c1)):
                ok = False
                break
        if ok:
            keep.add(f)
    return frozenset(keep)


def karp_levels(m0: Structure, m1: Structure, theta: int, up_to: Optional[int] = None,
                node_budget: int = DEFAULT_NODE_BUDGET) -> KarpHierarchy:
    """Compute levels 0..up_to, stopping early once a level repeats (up_to=None: until then)."""
    if theta < 1:
        raise ValueError("theta must be positive")
    board = board_for(m0, m1)
    budget = [node_budget, node_budget]
    levels = [frozenset(_all_partial_isos(board))]
    rank = None
    while up_to is None or len(levels) <= up_to:
        nxt = _refine(board, theta, levels[-1], budget)
        if nxt == levels[-1]:
            rank = len(levels) - 1
            break
        levels.append(nxt)
    return KarpHierarchy(m0, m1, theta, levels, rank)


def karp_equiv(m0: Structure, m1: Structure, theta: int, beta: int, **kw) -> bool:
    return bool(karp_levels(m0, m1, theta, beta, **kw).level_encoded(beta))


def karp_rank(m0: Structure, m1: Structure, theta: int, f, **kw) -> Union[int, str]:
    """Largest level containing ``f``, or STABLE if it survives every level."""
    board = board_for(m0, m1)
    g = [-1] * board.n0
    try:
        for a, b in partial_map(f):
            i, j = m0.index(a), m1.index(b)
            if g[i] >= 0 or j in g or not board.compatible(g, i, j):
                raise ValueError(f"{sorted(partial_map(f))} is not a partial isomorphism")
            g[i] = j
    except StructureError as exc:
        raise ValueError(str(exc)) from None
    g = tuple(g)
    h = karp_levels(m0, m1, theta, None, **kw)
    if g in h.encoded[h.rank]:
        return STABLE
    k = 0
    while g in h.encoded[k + 1]:
        k += 1
    return k
