"""Hypothesis strategies and a coefficient-vector oracle for ordinals below w^w."""
from hypothesis import strategies as hst

from simgame.ordinal import Ordinal, from_nat, omega_power


def small_ordinals(max_exp=4, max_coef=4):
    """Ordinals below w^(max_exp+1) as (ordinal, coefficient vector indexed by exponent)."""
    vec = hst.lists(hst.integers(0, max_coef), min_size=max_exp + 1, max_size=max_exp + 1)
    return vec.map(lambda v: (from_vector(v), tuple(v)))


def from_vector(v):
    terms = [(from_nat(e), k) for e, k in reversed(list(enumerate(v))) if k]
    return Ordinal(terms)


def vec_cmp(a, b):
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def vec_add(a, b):
    top = max((e for e, k in enumerate(b) if k), default=None)
    if top is None:
        return tuple(a)
    out = [0] * len(a)
    for e in range(len(a)):
        if e > top:
            out[e] = a[e]
        elif e == top:
            out[e] = a[e] + b[e]
        else:
            out[e] = b[e]
    return tuple(out)


def vec_nat_sum(a, b):
    return tuple(x + y for x, y in zip(a, b))


@hst.composite
def ordinals(draw, depth=2):
    """Ordinals below epsilon_0 with exponents nested up to ``depth``."""
    n = draw(hst.integers(0, 3))
    if depth == 0:
        exps = sorted(set(draw(hst.lists(hst.integers(0, 4), min_size=n, max_size=n))), reverse=True)
        exps = [from_nat(e) for e in exps]
    else:
        raw = draw(hst.lists(ordinals(depth=depth - 1), min_size=n, max_size=n))
        exps = sorted(set(raw), reverse=True)
    return Ordinal([(e, draw(hst.integers(1, 3))) for e in exps])
