"""Exact solver for the similarity game on finite structures.

Positions carry a height (the residual ordinal), the two sets of elements that
have been asked about, a partial isomorphism between them and a height for
every asked element.  Adam lowers the height and names new elements; Eve
extends the position, lowering element heights and matching every element whose
height reaches 0.

Finite theta is read as a bound on how many *new* elements Adam may name on
each side in one move.  Positions themselves are not size-bounded: with an
infinite theta the union of a position and a challenge is again of size theta,
and dropping the bound is the finite counterpart of that absorption.

Internally a core position (a position without its height) is a triple of
tuples ``(h0, h1, g)``: ``h0[i]`` is the height of element ``i`` of the first
board or -1 when absent, ``h1`` likewise for the second board, and ``g[i]`` is
the partner of ``i`` on the second board or -1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .ordinal import OMEGA, ONE, ZERO, Ordinal, as_ordinal, from_nat, nat_sum, to_nat
from .structure import Structure, StructureError, automorphisms

DEFAULT_NODE_BUDGET = 10 ** 7


class Player(str, Enum):
    ADAM = "Adam"
    EVE = "Eve"

    def __str__(self):
        return self.value


ADAM, EVE = Player.ADAM, Player.EVE


class GameError(ValueError):
    pass


class InadmissibleParams(GameError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"node budget of {budget} expanded nodes exceeded")
        self.budget = budget


@dataclass(frozen=True)
class GameParams:
    beta: Ordinal
    theta: int
    alpha: Ordinal

    def __post_init__(self):
        object.__setattr__(self, "beta", as_ordinal(self.beta))
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))
        if not isinstance(self.theta, int) or self.theta < 1:
            raise GameError(f"theta must be a positive integer, got {self.theta!r}")
        if self.alpha < 1:
            raise GameError("alpha must be at least 1")

    def check_admissible(self):
        for name, value in (("beta", self.beta), ("alpha", self.alpha)):
            if value > OMEGA:
                raise InadmissibleParams(
                    f"{name}={value} is above w; exhaustive solving admits only finite values or w")

    def to_json(self) -> dict:
        return {"beta": str(self.beta), "theta": self.theta, "alpha": str(self.alpha)}

    def __str__(self):
        return f"(beta={self.beta}, theta={self.theta}, alpha={self.alpha})"


# public position objects -------------------------------------------------

def _items(mapping) -> tuple:
    if isinstance(mapping, Mapping):
        mapping = mapping.items()
    return tuple(sorted((str(k), as_ordinal(v)) for k, v in mapping))


@dataclass(frozen=True)
class CorePosition:
    h0: Tuple[Tuple[str, Ordinal], ...] = ()
    h1: Tuple[Tuple[str, Ordinal], ...] = ()
    g: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "h0", _items(self.h0))
        object.__setattr__(self, "h1", _items(self.h1))
        g = self.g.items() if isinstance(self.g, Mapping) else self.g
        object.__setattr__(self, "g", tuple(sorted((str(a), str(b)) for a, b in g)))

    @property
    def a0(self) -> FrozenSet[str]:
        return frozenset(e for e, _ in self.h0)

    @property
    def a1(self) -> FrozenSet[str]:
        return frozenset(e for e, _ in self.h1)

    @property
    def gmap(self) -> Dict[str, str]:
        return dict(self.g)

    def sort_key(self):
        return (len(self.h0) + len(self.h1), self.h0, self.h1, self.g)

    def to_json(self) -> dict:
        return {"h0": {e: str(h) for e, h in self.h0},
                "h1": {e: str(h) for e, h in self.h1},
                "g": [list(p) for p in self.g]}


@dataclass(frozen=True)
class Position:
    height: Ordinal
    h0: Tuple[Tuple[str, Ordinal], ...] = ()
    h1: Tuple[Tuple[str, Ordinal], ...] = ()
    g: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "height", as_ordinal(self.height))
        core = CorePosition(self.h0, self.h1, self.g)
        object.__setattr__(self, "h0", core.h0)
        object.__setattr__(self, "h1", core.h1)
        object.__setattr__(self, "g", core.g)

    @classmethod
    def start(cls, beta) -> "Position":
        return cls(beta)

    @property
    def core(self) -> CorePosition:
        return CorePosition(self.h0, self.h1, self.g)

    a0 = CorePosition.a0
    a1 = CorePosition.a1
    gmap = CorePosition.gmap

    def sort_key(self):
        return (self.height, len(self.h0) + len(self.h1), self.h0, self.h1, self.g)

    def to_json(self) -> dict:
        out = {"height": str(self.height)}
        out.update(self.core.to_json())
        return out

    @classmethod
    def from_json(cls, obj) -> "Position":
        return cls(obj["height"], obj.get("h0", {}), obj.get("h1", {}), [tuple(p) for p in obj.get("g", [])])

    def __str__(self):
        h0 = ",".join(f"{e}:{h}" for e, h in self.h0) or "-"
        h1 = ",".join(f"{e}:{h}" for e, h in self.h1) or "-"
        g = ",".join(f"{a}>{b}" for a, b in self.g) or "-"
        return f"[height {self.height} | {h0} | {h1} | {g}]"


@dataclass(frozen=True)
class AdamMove:
    beta: Ordinal
    b0: FrozenSet[str] = frozenset()
    b1: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "beta", as_ordinal(self.beta))
        object.__setattr__(self, "b0", frozenset(self.b0))
        object.__setattr__(self, "b1", frozenset(self.b1))

    def to_json(self) -> dict:
        return {"beta": str(self.beta), "b0": sorted(self.b0), "b1": sorted(self.b1)}

    def __str__(self):
        return f"({self.beta}, {{{','.join(sorted(self.b0))}}}, {{{','.join(sorted(self.b1))}}})"


@dataclass
class PositionalStrategy:
    """A set of Eve positions closed under answering Adam's moves."""
    positions: FrozenSet[Position]
    params: Optional[GameParams] = None
    m0: Optional[Structure] = None
    m1: Optional[Structure] = None
    owner: Player = EVE

    def __post_init__(self):
        self.positions = frozenset(self.positions)

    def __len__(self):
        return len(self.positions)

    def __contains__(self, p):
        return p in self.positions

    def sorted_positions(self) -> List[Position]:
        return sorted(self.positions, key=lambda p: (-_height_rank(p.height), p.sort_key()[1:]))

    def to_json(self) -> dict:
        return {"owner": str(self.owner),
                "params": self.params.to_json() if self.params else None,
                "positions": [p.to_json() for p in self.sorted_positions()]}


def _height_rank(h: Ordinal):
    n = to_nat(h)
    return float("inf") if n is None else n


@dataclass
class SolveResult:
    winner: Player
    params: GameParams
    mode: str
    strategy: Optional[PositionalStrategy] = None
    refutation: Optional[Dict[Position, AdamMove]] = None
    stats: Dict[str, int] = field(default_factory=dict)
    solver: Optional["Solver"] = field(default=None, repr=False)

    def to_json(self, include_strategy: bool = False) -> dict:
        out = {"winner": str(self.winner), "params": self.params.to_json(), "mode": self.mode,
               "stats": dict(self.stats)}
        if include_strategy and self.strategy is not None:
            out["strategy"] = self.strategy.to_json()
        if include_strategy and self.refutation is not None:
            out["refutation"] = [{"position": p.to_json(), "move": m.to_json()}
                                 for p, m in sorted(self.refutation.items(),
                                                    key=lambda kv: (-_height_rank(kv[0].height),
                                                                    kv[0].sort_key()[1:]))]
        return out


# boards: index-level view of two structures ------------------------------

class Board:
    """Index tables for a pair of structures over one vocabulary."""

    def __init__(self, m0: Structure, m1: Structure):
        if m0.vocabulary != m1.vocabulary:
            raise StructureError("structures have different vocabularies")
        self.m0, self.m1 = m0, m1
        self.n0, self.n1 = len(m0), len(m1)
        voc = m0.vocabulary
        small = [(n, a) for n, a in voc.relations if a <= 2]
        self.high = []
        for n, a in voc.relations:
            if a > 2:
                self.high.append((a, {tuple(m0.index(e) for e in t) for t in m0.relations[n]},
                                  {tuple(m1.index(e) for e in t) for t in m1.relations[n]}))
        consts = sorted(voc.constants)
        self.self0 = self._self_types(m0, small, consts)
        self.self1 = self._self_types(m1, small, consts)
        self.pair0 = self._pair_types(m0, small)
        self.pair1 = self._pair_types(m1, small)

    @staticmethod
    def _self_types(m, small, consts):
        out = []
        for e in m.universe:
            bits = 0
            k = 0
            for n, a in small:
                t = (e,) * a
                if t in m.relations[n]:
                    bits |= 1 << k
                k += 1
            for c in consts:
                if m.constants[c] == e:
                    bits |= 1 << k
                k += 1
            out.append(bits)
        return out

    @staticmethod
    def _pair_types(m, small):
        binary = [m.relations[n] for n, a in small if a == 2]
        u = m.universe
        table = []
        for x in u:
            row = []
            for y in u:
                bits = 0
                for k, r in enumerate(binary):
                    if (x, y) in r:
                        bits |= 1 << (2 * k)
                    if (y, x) in r:
                        bits |= 1 << (2 * k + 1)
                row.append(bits)
            table.append(row)
        return table

    def compatible(self, g: Sequence[int], a: int, b: int) -> bool:
        """Can the pair (a, b) be added to the partial isomorphism ``g``?"""
        if self.self0[a] != self.self1[b]:
            return False
        p0, p1 = self.pair0[a], self.pair1[b]
        for x, y in enumerate(g):
            if y >= 0 and p0[x] != p1[y]:
                return False
        if self.high:
            dom = [x for x, y in enumerate(g) if y >= 0] + [a]
            img = {x: g[x] for x in dom[:-1]}
            img[a] = b
            for arity, t0, t1 in self.high:
                for t in itertools.product(dom, repeat=arity):
                    if a in t and (t in t0) != (tuple(img[x] for x in t) in t1):
                        return False
        return True

    def is_iso(self, g: Sequence[int]) -> bool:
        partial = [-1] * self.n0
        for a, b in enumerate(g):
            if b >= 0:
                if not self.compatible(partial, a, b):
                    return False
                partial[a] = b
        return True

    # conversions -----------------------------------------------------------
    def encode(self, core: CorePosition) -> tuple:
        h0 = [-1] * self.n0
        h1 = [-1] * self.n1
        g = [-1] * self.n0
        for e, h in core.h0:
            v = to_nat(h)
            if v is None:
                raise GameError(f"infinite element height {h} cannot be encoded")
            h0[self.m0.index(e)] = v
        for e, h in core.h1:
            v = to_nat(h)
            if v is None:
                raise GameError(f"infinite element height {h} cannot be encoded")
            h1[self.m1.index(e)] = v
        for a, b in core.g:
            g[self.m0.index(a)] = self.m1.index(b)
        return tuple(h0), tuple(h1), tuple(g)

    def decode(self, core: tuple) -> CorePosition:
        h0, h1, g = core
        u0, u1 = self.m0.universe, self.m1.universe
        return CorePosition(tuple((u0[i], from_nat(h)) for i, h in enumerate(h0) if h >= 0),
                            tuple((u1[i], from_nat(h)) for i, h in enumerate(h1) if h >= 0),
                            tuple((u0[i], u1[j]) for i, j in enumerate(g) if j >= 0))

    def position(self, r: int, core: tuple) -> Position:
        c = self.decode(core)
        return Position(from_nat(r), c.h0, c.h1, c.g)

    def empty_core(self) -> tuple:
        return (-1,) * self.n0, (-1,) * self.n1, (-1,) * self.n0


@lru_cache(maxsize=256)
def board_for(m0: Structure, m1: Structure) -> Board:
    return Board(m0, m1)


# move generation on encoded cores ----------------------------------------

def _rest(h: Sequence[int]) -> List[int]:
    return [i for i, v in enumerate(h) if v < 0]


def _subsets(items: Sequence[int], max_size: int, exact: bool = False):
    top = min(max_size, len(items))
    sizes = [top] if exact else range(top, -1, -1)
    for k in sizes:
        yield from itertools.combinations(items, k)


def adam_moves_encoded(core: tuple, r: int, theta: int, full: bool):
    """Adam's moves at residual height ``r`` as ``(beta', new0, new1)``."""
    h0, h1, _ = core
    rest0, rest1 = _rest(h0), _rest(h1)
    heights = range(r - 1, -1, -1) if full else (r - 1,)
    for bp in heights:
        for n0 in _subsets(rest0, theta, exact=not full):
            for n1 in _subsets(rest1, theta, exact=not full):
                yield bp, n0, n1


def lazy_replies(board: Board, core: tuple, n0: Sequence[int], n1: Sequence[int],
                 amax: Optional[int], cap: Optional[int]) -> Iterator[tuple]:
    """Eve's canonical replies: heights as large as allowed, matches only when forced.

    ``amax`` is the largest admissible element height (None for alpha = w) and
    ``cap`` the largest height worth distinguishing (None for no cap).
    """
    h0, h1, g = core
    h0 = list(h0)
    h1 = list(h1)
    g0 = list(g)
    g1 = [-1] * board.n1
    for a, b in enumerate(g0):
        if b >= 0:
            g1[b] = a
    if amax is None:
        newh = cap
    elif cap is None:
        newh = amax
    else:
        newh = min(amax, cap)
    for hs, gs in ((h0, g0), (h1, g1)):
        for i, v in enumerate(hs):
            if v > 0:
                if gs[i] >= 0:
                    hs[i] = 0
                else:
                    hs[i] = v - 1 if cap is None else min(v - 1, cap)
    for i in n0:
        h0[i] = newh
    for i in n1:
        h1[i] = newh
    forced0 = [i for i, v in enumerate(h0) if v == 0 and g0[i] < 0]
    forced1 = [i for i, v in enumerate(h1) if v == 0 and g1[i] < 0]
    n_0, n_1 = board.n0, board.n1

    def stage2(k):
        while k < len(forced1) and g1[forced1[k]] >= 0:
            k += 1
        if k == len(forced1):
            yield tuple(h0), tuple(h1), tuple(g0)
            return
        b = forced1[k]
        for a in range(n_0):
            if g0[a] < 0 and board.compatible(g0, a, b):
                old = h0[a]
                h0[a] = 0
                g0[a] = b
                g1[b] = a
                yield from stage2(k + 1)
                g0[a] = -1
                g1[b] = -1
                h0[a] = old

    def stage1(k):
        if k == len(forced0):
            yield from stage2(0)
            return
        a = forced0[k]
        for b in range(n_1):
            if g1[b] < 0 and board.compatible(g0, a, b):
                old = h1[b]
                h1[b] = 0
                g0[a] = b
                g1[b] = a
                yield from stage1(k + 1)
                g0[a] = -1
                g1[b] = -1
                h1[b] = old

    yield from stage1(0)


def full_replies(board: Board, core: tuple, n0: Sequence[int], n1: Sequence[int],
                 amax: Optional[int], cap: int) -> Iterator[tuple]:
    """Every legal reply, heights above ``cap`` excluded (they behave like ``cap``)."""
    h0, h1, g = core
    top = cap if amax is None else min(amax, cap)
    base0 = set(i for i, v in enumerate(h0) if v >= 0) | set(n0)
    base1 = set(i for i, v in enumerate(h1) if v >= 0) | set(n1)
    extra0 = [i for i in range(board.n0) if i not in base0]
    extra1 = [i for i in range(board.n1) if i not in base1]
    matched1 = set(b for b in g if b >= 0)

    def choices(hs, i, matched):
        v = hs[i]
        if v < 0:
            return range(top, -1, -1)
        if v == 0:
            return (0,)
        return range(min(v - 1, cap), -1, -1)

    for x0 in _subsets(extra0, len(extra0)):
        a0 = sorted(base0 | set(x0))
        for x1 in _subsets(extra1, len(extra1)):
            a1 = sorted(base1 | set(x1))
            ranges = [choices(h0, i, None) for i in a0] + [choices(h1, i, None) for i in a1]
            for hv in itertools.product(*ranges):
                nh0 = [-1] * board.n0
                nh1 = [-1] * board.n1
                for i, v in zip(a0, hv):
                    nh0[i] = v
                for i, v in zip(a1, hv[len(a0):]):
                    nh1[i] = v
                yield from _extend_matchings(board, nh0, nh1, list(g), a0, a1, matched1)


def _extend_matchings(board, h0, h1, g0, a0, a1, matched1):
    free0 = [i for i in a0 if g0[i] < 0]
    free1 = [j for j in a1 if j not in matched1]
    used = set()
    need1 = [j for j in free1 if h1[j] == 0]

    def rec(k):
        if k == len(free0):
            if all(j in used for j in need1):
                yield tuple(h0), tuple(h1), tuple(g0)
            return
        a = free0[k]
        if h0[a] > 0:
            yield from rec(k + 1)
        for b in free1:
            if b not in used and board.compatible(g0, a, b):
                g0[a] = b
                used.add(b)
                yield from rec(k + 1)
                used.discard(b)
                g0[a] = -1

    yield from rec(0)


def cap_core(core: tuple, cap: int) -> tuple:
    h0, h1, g = core
    return (tuple(v if v <= cap else cap for v in h0),
            tuple(v if v <= cap else cap for v in h1), g)


# the solver ------------------------------------------------------------

MODES = {
    # mode: (Adam moves full?, Eve replies full?)
    "normalized": (False, False),
    "lazy": (True, False),
    "full": (True, True),
}


class Solver:
    """Memoized backward induction over (residual height, core position)."""

    def __init__(self, m0: Structure, m1: Structure, params: GameParams, mode: str = "normalized",
                 node_budget: int = DEFAULT_NODE_BUDGET, symmetry: bool = False):
        if mode not in MODES:
            raise GameError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}")
        params.check_admissible()
        self.board = board_for(m0, m1)
        self.m0, self.m1 = m0, m1
        self.params = params
        self.mode = mode
        self.theta = params.theta
        self.adam_full, self.eve_full = MODES[mode]
        a = to_nat(params.alpha)
        self.amax = None if a is None else a - 1
        self.node_budget = node_budget
        self.memo: Dict[tuple, bool] = {}
        self.nodes = 0
        self.hits = 0
        self.symmetry = None
        if symmetry:
            self.symmetry = [(p0, p1) for p0 in automorphisms(m0) for p1 in automorphisms(m1)]

    # keys -----------------------------------------------------------------
    def key(self, r: int, core: tuple) -> tuple:
        core = cap_core(core, r + 1)
        if self.symmetry:
            core = min(self._permute(core, p0, p1) for p0, p1 in self.symmetry)
        return r, core

    @staticmethod
    def _permute(core, p0, p1):
        h0, h1, g = core
        nh0 = [-1] * len(h0)
        nh1 = [-1] * len(h1)
        ng = [-1] * len(g)
        for i, v in enumerate(h0):
            nh0[p0[i]] = v
            if g[i] >= 0:
                ng[p0[i]] = p1[g[i]]
        for j, v in enumerate(h1):
            nh1[p1[j]] = v
        return tuple(nh0), tuple(nh1), tuple(ng)

    # moves ----------------------------------------------------------------
    def adam_moves(self, core: tuple, r: int, full: Optional[bool] = None):
        return adam_moves_encoded(core, r, self.theta, self.adam_full if full is None else full)

    def replies(self, core: tuple, bp: int, n0, n1, full: Optional[bool] = None):
        if self.eve_full if full is None else full:
            return full_replies(self.board, core, n0, n1, self.amax, bp + 1)
        return lazy_replies(self.board, core, n0, n1, self.amax, bp + 1)

    # evaluation ------------------------------------------------------------
    def win(self, r: int, core: tuple) -> bool:
        """Does Eve win from ``core`` with residual height ``r``?"""
        if r == 0:
            return True
        k = self.key(r, core)
        v = self.memo.get(k)
        if v is not None:
            self.hits += 1
            return v
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded(self.node_budget)
        result = True
        for bp, n0, n1 in self.adam_moves(core, r):
            if not any(self.win(bp, q) for q in self.replies(core, bp, n0, n1)):
                result = False
                break
        self.memo[k] = result
        return result

    def winning_reply(self, core: tuple, move, full_eve: Optional[bool] = None):
        bp, n0, n1 = move
        for q in self.replies(core, bp, n0, n1, full_eve):
            if self.win(bp, q):
                return q
        return None

    def refuting_move(self, core: tuple, r: int):
        for move in self.adam_moves(core, r):
            if self.winning_reply(core, move) is None:
                return move
        return None

    # extraction ------------------------------------------------------------
    def extract_strategy(self, beta: int, full_coverage: bool = False) -> PositionalStrategy:
        start = self.board.empty_core()
        if not self.win(beta, start):
            raise GameError("Eve does not win; no strategy to extract")
        seen = set()
        stack = [(beta, start)]
        while stack:
            r, c = stack.pop()
            if (r, c) in seen:
                continue
            seen.add((r, c))
            if r == 0:
                continue
            for move in self.adam_moves(c, r, full=full_coverage or self.adam_full):
                q = self.winning_reply(c, move)
                stack.append((move[0], q))
        return PositionalStrategy(frozenset(self.board.position(r, c) for r, c in seen),
                                  self.params, self.m0, self.m1)

    def winning_region(self, beta: int, universe: Iterable[tuple]) -> PositionalStrategy:
        """Every Eve-winning position of height <= beta over the given cores."""
        universe = list(universe)
        positions = set()
        for r in range(beta + 1):
            for c in universe:
                if self.win(r, c):
                    positions.add(self.board.position(r, c))
        return PositionalStrategy(frozenset(positions), self.params, self.m0, self.m1)

    def extract_refutation(self, beta: int) -> Dict[Position, AdamMove]:
        start = self.board.empty_core()
        table = {}
        stack = [(beta, start)]
        seen = set()
        while stack:
            r, c = stack.pop()
            if (r, c) in seen or r == 0:
                continue
            seen.add((r, c))
            move = self.refuting_move(c, r)
            if move is None:
                continue
            table[self.board.position(r, c)] = self.move_object(c, move)
            bp, n0, n1 = move
            for q in self.replies(c, bp, n0, n1):
                stack.append((bp, q))
        return table

    def move_object(self, core: tuple, move) -> AdamMove:
        bp, n0, n1 = move
        h0, h1, _ = core
        u0, u1 = self.m0.universe, self.m1.universe
        b0 = {u0[i] for i, v in enumerate(h0) if v >= 0} | {u0[i] for i in n0}
        b1 = {u1[i] for i, v in enumerate(h1) if v >= 0} | {u1[i] for i in n1}
        return AdamMove(from_nat(bp), b0, b1)

    def stats(self) -> Dict[str, int]:
        return {"nodes": self.nodes, "memo_hits": self.hits, "memo_size": len(self.memo)}


# core universes ------------------------------------------------------------

def all_cores(board: Board, amax: int) -> List[tuple]:
    """Every valid core position in canonical form (matched elements at height 0)."""
    out = []
    n0, n1 = board.n0, board.n1
    for mask0 in range(1 << n0):
        a0 = [i for i in range(n0) if mask0 >> i & 1]
        for mask1 in range(1 << n1):
            a1 = [j for j in range(n1) if mask1 >> j & 1]
            for g in _all_matchings(board, a0, a1):
                matched1 = set(b for b in g if b >= 0)
                free0 = [i for i in a0 if g[i] < 0]
                free1 = [j for j in a1 if j not in matched1]
                for hv in itertools.product(range(1, amax + 1), repeat=len(free0) + len(free1)):
                    h0 = [-1] * n0
                    h1 = [-1] * n1
                    for i in a0:
                        h0[i] = 0
                    for j in a1:
                        h1[j] = 0
                    for i, v in zip(free0, hv):
                        h0[i] = v
                    for j, v in zip(free1, hv[len(free0):]):
                        h1[j] = v
                    out.append((tuple(h0), tuple(h1), g))
    return out


def _all_matchings(board, a0, a1):
    g = [-1] * board.n0
    used = set()

    def rec(k):
        if k == len(a0):
            yield tuple(g)
            return
        a = a0[k]
        yield from rec(k + 1)
        for b in a1:
            if b not in used and board.compatible(g, a, b):
                g[a] = b
                used.add(b)
                yield from rec(k + 1)
                used.discard(b)
                g[a] = -1

    yield from rec(0)


def reachable_cores(board: Board, theta: int, amax: int, start: Optional[tuple] = None) -> List[tuple]:
    """Cores reachable from ``start`` under maximal challenges and canonical replies."""
    start = board.empty_core() if start is None else start
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for _, n0, n1 in adam_moves_encoded(c, 1, theta, full=False):
            for q in lazy_replies(board, c, n0, n1, amax, None):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return sorted(seen)


def _universe(board, theta, amax, universe):
    if universe == "all":
        return all_cores(board, amax)
    if universe == "reachable":
        return reachable_cores(board, theta, amax)
    raise GameError(f"unknown universe {universe!r}")


def _finite_alpha(alpha) -> int:
    a = to_nat(as_ordinal(alpha))
    if a is None or a < 1:
        raise GameError("alpha must be a positive finite ordinal here")
    return a


# public operations -------------------------------------------------------

def _encoded(board: Board, p) -> tuple:
    core = p.core if isinstance(p, Position) else p
    try:
        return board.encode(core)
    except StructureError as exc:
        raise GameError(f"dangling element reference: {exc}") from None


def validate_position(p: Position, params: GameParams, m0: Structure, m1: Structure) -> bool:
    """Check a position against the position conditions for these parameters."""
    for e, _ in p.h0:
        if e not in m0:
            raise GameError(f"dangling element {e!r} on the first board")
    for e, _ in p.h1:
        if e not in m1:
            raise GameError(f"dangling element {e!r} on the second board")
    return position_violation(p, params, m0, m1) is None


def position_violation(p: Position, params: GameParams, m0: Structure, m1: Structure) -> Optional[str]:
    """Name the first violated position condition, or None for a valid position."""
    if p.height > params.beta:
        return f"(1) height {p.height} exceeds beta={params.beta}"
    a0, a1 = p.a0, p.a1
    g = p.gmap
    if len(set(g.values())) != len(g):
        return "(3) g is not injective"
    for a, b in g.items():
        if a not in a0 or b not in a1:
            return f"(3) g pairs {a}>{b} outside the asked sets"
    board = board_for(m0, m1)
    enc = [-1] * board.n0
    for a, b in g.items():
        enc[m0.index(a)] = m1.index(b)
    if not board.is_iso(enc):
        return "(3) g is not a partial isomorphism"
    for e, h in p.h0 + p.h1:
        if not h < params.alpha:
            return f"(4) height {h} of {e} is not below alpha={params.alpha}"
    ran = set(g.values())
    for e, h in p.h0:
        if h == 0 and e not in g:
            return f"(5) {e} has height 0 on the first board but is unmatched"
    for e, h in p.h1:
        if h == 0 and e not in ran:
            return f"(5) {e} has height 0 on the second board but is unmatched"
    return None


def extension_violation(q: Position, p: Position) -> Optional[str]:
    if not q.height < p.height:
        return "(1) height must strictly decrease"
    if not (p.a0 <= q.a0 and p.a1 <= q.a1):
        return "(2) asked sets must grow"
    gq = q.gmap
    for a, b in p.g:
        if gq.get(a) != b:
            return f"(3) existing match {a}>{b} must be kept"
    hq0, hq1 = dict(q.h0), dict(q.h1)
    for side, hp, hq in ((0, p.h0, hq0), (1, p.h1, hq1)):
        for e, h in hp:
            v = hq[e]
            if v > h:
                return f"(4) height of {e} rose from {h} to {v}"
            if h > 0 and not v < h:
                return f"(4) positive height of {e} must strictly decrease (was {h}, now {v})"
    return None


def extends(q: Position, p: Position) -> bool:
    """True iff ``q`` extends ``p``; a match made earlier must persist, new matches may be added."""
    return extension_violation(q, p) is None


def covers(q: Position, move: AdamMove) -> bool:
    return move.b0 <= q.a0 and move.b1 <= q.a1


def move_violation(p: Position, move: AdamMove, params: GameParams, m0: Structure, m1: Structure) -> Optional[str]:
    if not move.beta < p.height:
        return f"beta'={move.beta} must be below the current height {p.height}"
    for e in move.b0:
        if e not in m0:
            return f"unknown element {e!r} on the first board"
    for e in move.b1:
        if e not in m1:
            return f"unknown element {e!r} on the second board"
    if len(move.b0 - p.a0) > params.theta or len(move.b1 - p.a1) > params.theta:
        return f"a move may name at most theta={params.theta} new elements per board"
    return None


def adam_moves(p: Position, params: GameParams, m0: Structure, m1: Structure,
               mode: str = "normalized") -> Iterator[AdamMove]:
    """Adam's moves at ``p``; challenge sets are returned as supersets of the asked sets.

    ``normalized`` fixes beta' to the predecessor and names as many new elements
    as allowed; ``full`` lists every legal move.  At a limit height the
    enumeration of beta' is infinite.
    """
    if mode not in ("normalized", "full"):
        raise GameError(f"unknown Adam mode {mode!r}")
    board = board_for(m0, m1)
    core = _encoded(board, p)
    full = mode == "full"
    u0, u1 = m0.universe, m1.universe
    a0, a1 = p.a0, p.a1
    h = p.height
    if h.is_zero():
        return
    if to_nat(h) is not None:
        heights = ((from_nat(b) for b in range(to_nat(h) - 1, -1, -1)) if full
                   else (from_nat(to_nat(h) - 1),))
    elif h == OMEGA:
        heights = (from_nat(n) for n in itertools.count())
    else:
        raise InadmissibleParams("only finite heights and w can be enumerated")
    rest0, rest1 = _rest(core[0]), _rest(core[1])
    for bp in heights:
        for n0 in _subsets(rest0, params.theta, exact=not full):
            for n1 in _subsets(rest1, params.theta, exact=not full):
                yield AdamMove(bp, a0 | {u0[i] for i in n0}, a1 | {u1[i] for i in n1})


def eve_replies(p: Position, move: AdamMove, params: GameParams, m0: Structure, m1: Structure,
                mode: str = "lazy") -> Iterator[Position]:
    """Eve's replies to ``move``; an empty enumeration means Eve loses here.

    ``full`` lists every legal reply whose element heights are at most beta'+1
    (larger heights are interchangeable with beta'+1); ``lazy`` lists the
    canonical replies only.
    """
    if mode not in ("lazy", "full"):
        raise GameError(f"unknown Eve mode {mode!r}")
    if move_violation(p, move, params, m0, m1) is not None:
        return
    board = board_for(m0, m1)
    core = _encoded(board, p)
    bp = to_nat(move.beta)
    if bp is None:
        raise InadmissibleParams("replies are only enumerated for finite beta'")
    a = to_nat(params.alpha)
    amax = None if a is None else a - 1
    n0 = [m0.index(e) for e in sorted(move.b0 - p.a0)]
    n1 = [m1.index(e) for e in sorted(move.b1 - p.a1)]
    gen = (full_replies if mode == "full" else lazy_replies)(board, core, n0, n1, amax, bp + 1)
    for q in gen:
        yield board.position(bp, q)


def solve(m0: Structure, m1: Structure, params: GameParams, mode: str = "normalized",
          node_budget: int = DEFAULT_NODE_BUDGET, symmetry: bool = False,
          strategy: Optional[str] = "reachable", coverage: str = "normalized") -> SolveResult:
    """Decide the game and, when possible, return a witness for the winner.

    ``strategy`` selects Eve's witness: ``"reachable"`` (positions reached by
    the chosen replies), ``"region"`` (all winning positions over every core) or
    None.  ``coverage`` is the Adam move space the reachable witness answers.
    """
    params.check_admissible()
    solver = Solver(m0, m1, params, mode, node_budget, symmetry)
    beta = to_nat(params.beta)
    if beta is None:
        winner = _solve_limit(solver)
        stats = solver.stats()
        if hasattr(solver, "stabilization_rank"):
            stats["stabilization_rank"] = solver.stabilization_rank
        return SolveResult(winner, params, mode, stats=stats, solver=solver)
    start = solver.board.empty_core()
    winner = EVE if solver.win(beta, start) else ADAM
    result = SolveResult(winner, params, mode, solver=solver)
    if winner is EVE and strategy == "reachable":
        result.strategy = solver.extract_strategy(beta, full_coverage=coverage == "full")
    elif winner is EVE and strategy == "region":
        amax = solver.amax if solver.amax is not None else beta + 1
        result.strategy = solver.winning_region(beta, all_cores(solver.board, amax))
    elif winner is ADAM and strategy is not None:
        result.refutation = solver.extract_refutation(beta)
    result.stats = solver.stats()
    return result


def _solve_limit(solver: Solver) -> Player:
    # beta = w: Adam picks any finite height, so Eve wins iff the start survives
    # every finite height; that happens iff it lies in the stabilized level.
    if solver.amax is None:
        # alpha = w as well: every new element can be given a height above the
        # number of remaining moves, so no element ever has to be matched.
        return EVE
    board = solver.board
    universe = reachable_cores(board, solver.theta, solver.amax)
    start = board.empty_core()
    level = set(universe)
    n = 0
    while True:
        nxt = {c for c in universe if solver.win(n + 1, c)}
        if nxt == level:
            break
        level = nxt
        n += 1
    solver.stabilization_rank = n
    return EVE if start in level else ADAM


def winner(m0, m1, beta, theta, alpha, mode="normalized", **kw) -> Player:
    return solve(m0, m1, GameParams(beta, theta, alpha), mode, strategy=None, **kw).winner


# strategies ----------------------------------------------------------------

def eve_trivial_strategy(params: GameParams, m0: Structure, m1: Structure) -> PositionalStrategy:
    """Eve keeps every element above the residual height and never matches.

    Every asked element gets height beta_p + 1, which stays below alpha whenever
    beta < alpha or alpha = w.  When beta = alpha is finite the last reply would
    need an unmatched element of height 0, so no such strategy exists.
    """
    if params.beta > params.alpha:
        raise GameError("the trivial strategy needs beta <= alpha")
    beta = to_nat(params.beta)
    if beta is None:
        raise GameError("the trivial strategy for beta = w has infinitely many positions")
    if to_nat(params.alpha) is not None and not params.beta < params.alpha:
        raise GameError("with beta = alpha finite, unmatched elements would reach height 0 "
                        "on the last move; no matching-free strategy exists")
    positions = {Position(params.beta)}
    u0, u1 = m0.universe, m1.universe
    subsets0 = [c for k in range(len(u0) + 1) for c in itertools.combinations(u0, k)]
    subsets1 = [c for k in range(len(u1) + 1) for c in itertools.combinations(u1, k)]
    for n in range(beta):
        h = from_nat(n + 1)
        for s0 in subsets0:
            for s1 in subsets1:
                positions.add(Position(from_nat(n), {e: h for e in s0}, {e: h for e in s1}))
    return PositionalStrategy(frozenset(positions), params, m0, m1)


class _Indexed:
    __slots__ = ("pos", "h0", "h1", "g", "a0", "a1")

    def __init__(self, pos: Position):
        self.pos = pos
        self.h0 = dict(pos.h0)
        self.h1 = dict(pos.h1)
        self.g = pos.gmap
        self.a0 = frozenset(self.h0)
        self.a1 = frozenset(self.h1)

    def extends(self, p: "_Indexed") -> bool:
        if not (p.a0 <= self.a0 and p.a1 <= self.a1):
            return False
        g = self.g
        for a, b in p.g.items():
            if g.get(a) != b:
                return False
        for hp, hq in ((p.h0, self.h0), (p.h1, self.h1)):
            for e, h in hp.items():
                v = hq[e]
                if h == 0:
                    if v != 0:
                        return False
                elif not v < h:
                    return False
        return True


def verify_eve_strategy(K: PositionalStrategy, params: GameParams, m0: Structure, m1: Structure,
                        coverage: str = "normalized", explain: bool = False):
    """Check that ``K`` contains the start and answers every Adam move inside ``K``.

    ``coverage`` chooses the Adam move space: ``normalized`` or ``full``.  With
    ``explain=True`` the result is ``(ok, reason)``.
    """
    def fail(reason):
        return (False, reason) if explain else False

    beta = to_nat(params.beta)
    if beta is None:
        raise InadmissibleParams("strategies are verified for finite beta only")
    if Position(params.beta) not in K.positions:
        return fail("the starting position is missing")
    by_height: Dict[int, List[_Indexed]] = {}
    items = []
    for p in K.positions:
        bad = position_violation(p, params, m0, m1)
        if bad is not None:
            return fail(f"invalid position {p}: {bad}")
        r = to_nat(p.height)
        if r is None:
            return fail(f"position {p} has an infinite height")
        ip = _Indexed(p)
        by_height.setdefault(r, []).append(ip)
        items.append((r, ip))
    full = coverage == "full"
    if coverage not in ("normalized", "full"):
        raise GameError(f"unknown coverage {coverage!r}")
    u0, u1 = m0.universe, m1.universe
    for r, p in items:
        if r == 0:
            continue
        rest0 = [e for e in u0 if e not in p.a0]
        rest1 = [e for e in u1 if e not in p.a1]
        heights = range(r - 1, -1, -1) if full else (r - 1,)
        for bp in heights:
            cands = [q for q in by_height.get(bp, ()) if q.extends(p)]
            for n0 in _subsets(rest0, params.theta, exact=not full):
                for n1 in _subsets(rest1, params.theta, exact=not full):
                    if not any(q.a0.issuperset(n0) and q.a1.issuperset(n1) for q in cands):
                        move = AdamMove(from_nat(bp), p.a0 | set(n0), p.a1 | set(n1))
                        return fail(f"no answer in K to {move} at {p.pos}")
    return (True, None) if explain else True


def compose_positions(p: Position, q: Position, alpha: Ordinal, alpha2: Ordinal) -> Position:
    """The composite of ``p`` (boards 0,1) and ``q`` (boards 1,2).

    Elements of the third board matched by ``q`` to middle elements that ``p``
    has not yet asked about are treated as if ``p`` gave them height ``alpha``.
    """
    hp0, hp1, gp = dict(p.h0), dict(p.h1), p.gmap
    hq0, hq1, gq = dict(q.h0), dict(q.h1), q.gmap
    gq_inv = {b: a for a, b in gq.items()}
    h0, h1, g = {}, {}, {}
    for a, h in hp0.items():
        if h > 0:
            h0[a] = nat_sum(h, alpha2)
        else:
            mid = gp[a]
            h0[a] = hq0[mid]
            if hq0[mid] == 0:
                g[a] = gq[mid]
    for b, h in hq1.items():
        if h > 0:
            h1[b] = nat_sum(alpha, h)
        else:
            mid = gq_inv[b]
            h1[b] = hp1.get(mid, alpha)
    return Position(p.height, h0, h1, g)


def compose(Kab: PositionalStrategy, Kbc: PositionalStrategy, check: bool = True) -> PositionalStrategy:
    """Compose Eve strategies for (m0,m1) and (m1,m2) into one for (m0,m2)."""
    pa, pb = Kab.params, Kbc.params
    if pa is None or pb is None or Kab.m1 is None or Kbc.m0 is None:
        raise GameError("strategies must carry their parameters and structures")
    if Kab.m1 != Kbc.m0:
        raise GameError("middle structures differ")
    if pa.beta != pb.beta or pa.theta != pb.theta:
        raise GameError("strategies must share beta and theta")
    if check:
        for K, p in ((Kab, pa), (Kbc, pb)):
            ok, why = verify_eve_strategy(K, p, K.m0, K.m1, explain=True)
            if not ok:
                raise GameError(f"input strategy does not verify: {why}")
    by_height: Dict[Ordinal, List[Position]] = {}
    for q in Kbc.positions:
        by_height.setdefault(q.height, []).append(q)
    out = set()
    for p in Kab.positions:
        a1 = p.a1
        for q in by_height.get(p.height, ()):
            if a1 <= q.a0:
                out.add(compose_positions(p, q, pa.alpha, pb.alpha))
    params = GameParams(pa.beta, pa.theta, nat_sum(pa.alpha, pb.alpha))
    return PositionalStrategy(frozenset(out), params, Kab.m0, Kbc.m1)


# height chains and the infinite game --------------------------------------

class HeightChain:
    """Levels S(0), ..., S(rank) of a stabilizing chain; ``rank`` is the least n with S(n) = S(n+1)."""

    def __init__(self, encoded: List[FrozenSet[tuple]], rank: int, board: Board):
        self.encoded = encoded
        self.rank = rank
        self.board = board
        self._levels = None

    @property
    def levels(self) -> List[FrozenSet[CorePosition]]:
        if self._levels is None:
            self._levels = [frozenset(self.board.decode(c) for c in lvl) for lvl in self.encoded]
        return self._levels

    @property
    def stable(self) -> FrozenSet[CorePosition]:
        return self.levels[self.rank]

    def __len__(self):
        return len(self.encoded)


def winning_heights(m0: Structure, m1: Structure, theta: int, alpha, universe: str = "all",
                    node_budget: int = DEFAULT_NODE_BUDGET, max_levels: int = 10_000) -> HeightChain:
    """Levels S(n) = cores from which Eve wins with n moves left, until S(n) = S(n+1).

    Every level is evaluated over the whole universe, so a non-shrinking chain
    would show up rather than being assumed away.
    """
    a = _finite_alpha(alpha)
    board = board_for(m0, m1)
    cores = _universe(board, theta, a - 1, universe)
    solver = Solver(m0, m1, GameParams(0, theta, a), "normalized", node_budget)
    levels = [frozenset(cores)]
    n = 0
    while n < max_levels:
        nxt = frozenset(c for c in cores if solver.win(n + 1, c))
        if nxt == levels[-1]:
            break
        levels.append(nxt)
        n += 1
    return HeightChain(levels, n, board)


def infinite_region(m0: Structure, m1: Structure, theta: int, alpha, universe: str = "all",
                    node_budget: int = DEFAULT_NODE_BUDGET, decode: bool = True):
    """Greatest fixpoint of X -> {c : every challenge has a reply inside X}.

    Returns ``(region, iterations)``; the region holds CorePositions, or the
    internal encodings when ``decode`` is false.
    """
    a = _finite_alpha(alpha)
    board = board_for(m0, m1)
    current = set(_universe(board, theta, a - 1, universe))
    work = 0
    iterations = 0
    while True:
        keep = set()
        for c in current:
            ok = True
            for _, n0, n1 in adam_moves_encoded(c, 1, theta, full=False):
                work += 1
                if work > node_budget:
                    raise BudgetExceeded(node_budget)
                if not any(q in current for q in lazy_replies(board, c, n0, n1, a - 1, None)):
                    ok = False
                    break
            if ok:
                keep.add(c)
        iterations += 1
        if keep == current:
            break
        current = keep
    if not decode:
        return frozenset(current), iterations
    return frozenset(board.decode(c) for c in current), iterations


def solve_infinite(m0: Structure, m1: Structure, theta: int, alpha, universe: str = "all",
                   node_budget: int = DEFAULT_NODE_BUDGET) -> Player:
    region, _ = infinite_region(m0, m1, theta, alpha, universe, node_budget)
    return EVE if CorePosition() in region else ADAM
