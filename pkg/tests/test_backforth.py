import itertools

import pytest

from simgame.backforth import STABLE, karp_equiv, karp_levels, karp_rank
from simgame.game import BudgetExceeded, EVE, winner
from simgame.structure import cycle, expand_constant, full_tree, is_isomorphic, linear_order, pure_set

import oracle
from gridlib import families, pairs

P1, P2, L3 = pure_set(1), pure_set(2), linear_order(3)


def ident(s):
    return [(e, e) for e in s.universe]


def test_level_zero_contains_identities():
    h = karp_levels(L3, L3, 2, 0)
    for k in range(4):
        for sub in itertools.combinations(ident(L3), k):
            assert list(sub) in h.level(0)


def test_pure_sets_examples():
    h = karp_levels(P1, P2, 2)
    assert [] in h.level(0)
    assert [] not in h.level(1)
    assert not karp_equiv(P1, P2, 2, 1)
    assert karp_rank(P1, P2, 2, []) == 0


def test_equiv_examples():
    for s in (P2, L3, cycle(3), full_tree(2, 1)):
        for th, be in itertools.product((1, 2, 3), (0, 1, 3, 5)):
            assert karp_equiv(s, s, th, be)
    assert karp_equiv(L3, L3, 2, 5)
    assert karp_rank(L3, L3, 2, ident(L3)) == STABLE


def test_rank_errors():
    with pytest.raises(ValueError):
        karp_rank(L3, L3, 1, [("e0", "e1"), ("e1", "e0")])


def test_budget():
    with pytest.raises(BudgetExceeded):
        karp_levels(linear_order(4), linear_order(4), 2, node_budget=5)


def _as_sets(h, n):
    return [set(h.level(k).maps) for k in range(n + 1)]


def test_matches_brute_force():
    for _, a, b in pairs(3):
        for th in (1, 2):
            h = karp_levels(a, b, th, 4)
            assert _as_sets(h, 4) == oracle.karp_oracle(a, b, th, 4)


def test_levels_decrease_and_restriction_closed():
    for _, a, b in pairs(3):
        for th in (1, 2):
            h = karp_levels(a, b, th)
            levels = [set(h.level(k).maps) for k in range(h.rank + 2)]
            for x, y in zip(levels, levels[1:]):
                assert y <= x
            for k, lv in enumerate(levels):
                for f in lv:
                    for r in range(len(f)):
                        for sub in itertools.combinations(sorted(f), r):
                            assert frozenset(sub) in lv


def test_restriction_rank():
    for a, b in [(linear_order(3), linear_order(4)), (cycle(3), cycle(4)), (P2, pure_set(3))]:
        h = karp_levels(a, b, 1)
        for f in h.level(0).maps:
            r = karp_rank(a, b, 1, f)
            for k in range(len(f)):
                for sub in itertools.combinations(sorted(f), k):
                    rs = karp_rank(a, b, 1, sub)
                    assert rs == STABLE or (r != STABLE and rs >= r)


def test_composition_closure_on_one_structure():
    for s in (linear_order(3), cycle(3), full_tree(2, 1)):
        for th in (1, 2):
            h = karp_levels(s, s, th)
            for k in range(h.rank + 1):
                lv = h.level(k).maps
                for f, g in itertools.product(lv, repeat=2):
                    fd = dict(f)
                    gd = dict(g)
                    if set(fd.values()) <= set(gd):
                        assert frozenset((a, gd[b]) for a, b in fd.items()) in lv


def test_bridge_small():
    for _, a, b in pairs(3):
        for th in (1, 2, 3):
            h = karp_levels(a, b, th, 8)
            for be in range(4):
                if h.level_encoded(2 * be):
                    assert winner(a, b, be, th, 1) is EVE


def test_alpha_one_is_isomorphism_at_full_width():
    for _, a, b in pairs(4):
        th = max(len(a), len(b))
        assert (winner(a, b, 1, th, 1) is EVE) == is_isomorphic(a, b)


def test_constants_respected():
    a = expand_constant(linear_order(2), "c", "e0")
    b = expand_constant(linear_order(2), "c", "e1")
    assert karp_equiv(a, b, 1, 1)
    assert not karp_equiv(a, b, 1, 2)
    assert karp_equiv(a, a, 1, 3)
