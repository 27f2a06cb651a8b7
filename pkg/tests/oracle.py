"""Brute-force reference implementations written straight from the definitions.

They share no code with the solver beyond the structure type and the
brute-force partial isomorphism test, and are only usable on tiny inputs.
"""
import itertools
from functools import lru_cache

from simgame.structure import is_partial_isomorphism


def _subsets(xs):
    xs = list(xs)
    for k in range(len(xs) + 1):
        yield from itertools.combinations(xs, k)


def game_oracle(m0, m1, beta, theta, alpha):
    """Eve wins?  Every legal Adam move and every legal Eve position, no caps."""
    U0, U1 = m0.universe, m1.universe

    def valid(h0, h1, g):
        gd = dict(g)
        if not is_partial_isomorphism(m0, m1, g):
            return False
        ran = set(gd.values())
        return all(v > 0 or a in gd for a, v in h0) and all(v > 0 or b in ran for b, v in h1)

    @lru_cache(maxsize=None)
    def win(height, h0, h1, g):
        if height == 0:
            return True
        A0 = {a for a, _ in h0}
        A1 = {b for b, _ in h1}
        for bp in range(height):
            for N0 in _subsets(x for x in U0 if x not in A0):
                if len(N0) > theta:
                    continue
                for N1 in _subsets(x for x in U1 if x not in A1):
                    if len(N1) > theta:
                        continue
                    if not any(win(bp, *q) for q in replies(h0, h1, g, set(N0), set(N1))):
                        return False
        return True

    def replies(h0, h1, g, N0, N1):
        A0 = {a for a, _ in h0}
        A1 = {b for b, _ in h1}
        old0, old1 = dict(h0), dict(h1)
        for X0 in _subsets(x for x in U0 if x not in A0 | N0):
            B0 = sorted(A0 | N0 | set(X0))
            for X1 in _subsets(x for x in U1 if x not in A1 | N1):
                B1 = sorted(A1 | N1 | set(X1))

                def opts(old, e):
                    if e not in old:
                        return range(alpha)
                    if old[e] == 0:
                        return (0,)
                    return range(old[e])

                for hv in itertools.product(*([opts(old0, e) for e in B0] + [opts(old1, e) for e in B1])):
                    nh0 = tuple(zip(B0, hv[:len(B0)]))
                    nh1 = tuple(zip(B1, hv[len(B0):]))
                    gd = dict(g)
                    free0 = [a for a in B0 if a not in gd]
                    used = set(gd.values())
                    free1 = [b for b in B1 if b not in used]
                    for extra in _partial_injections(free0, free1):
                        ng = tuple(sorted(set(g) | set(extra)))
                        if valid(nh0, nh1, ng):
                            yield nh0, nh1, ng

    return win(beta, (), (), ())


def _partial_injections(dom, cod):
    dom = list(dom)
    if not dom:
        yield ()
        return
    a, rest = dom[0], dom[1:]
    for tail in _partial_injections(rest, cod):
        yield tail
    for b in cod:
        for tail in _partial_injections(rest, [c for c in cod if c != b]):
            yield ((a, b),) + tail


def karp_oracle(m0, m1, theta, up_to):
    """Levels 0..up_to as sets of frozensets of pairs, by scanning whole levels."""
    level = set()
    for inj in _partial_injections(m0.universe, m1.universe):
        if is_partial_isomorphism(m0, m1, inj):
            level.add(frozenset(inj))
    levels = [level]
    small0 = [set(s) for s in _subsets(m0.universe) if len(s) <= theta]
    small1 = [set(s) for s in _subsets(m1.universe) if len(s) <= theta]
    for _ in range(up_to):
        prev = levels[-1]
        nxt = set()
        for f in prev:
            sup = [g for g in prev if f <= g]
            doms = [{a for a, _ in g} for g in sup]
            rans = [{b for _, b in g} for g in sup]
            if all(any(A <= d for d in doms) for A in small0) and all(any(A <= r for r in rans) for A in small1):
                nxt.add(f)
        levels.append(nxt)
    return levels
