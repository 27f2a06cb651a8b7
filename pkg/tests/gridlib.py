"""Structure families shared by the grid tests."""
import itertools

from simgame.structure import cycle, full_tree, linear_order, pure_set


def trees(max_size):
    out = []
    for d in range(0, 4):
        for k in range(1, 4):
            t = full_tree(k, d)
            if len(t) <= max_size and t not in out:
                out.append(t)
    return out


def families(max_size):
    return {
        "pure": [pure_set(n) for n in range(1, max_size + 1)],
        "order": [linear_order(n) for n in range(1, max_size + 1)],
        "tree": trees(max_size),
        "cycle": [cycle(n) for n in range(1, max_size + 1)],
    }


def pairs(max_size, ordered=True):
    for name, ss in families(max_size).items():
        it = itertools.product(ss, repeat=2) if ordered else itertools.combinations_with_replacement(ss, 2)
        for a, b in it:
            yield name, a, b


def label(s):
    return f"{sorted(s.vocabulary.symbols()) or 'pure'}|{len(s)}|{s.universe[-1]}"
