import itertools

import pytest

from simgame.game import GameParams
from simgame.logic import (Catalog, LogicError, UnionFind, enumerate_structures, exists_const,
                           family_from_spec, models, partition, phi_submodel, search_intransitivity,
                           sentence, sentence_and, sentence_not, sentence_or)
from simgame.backforth import karp_equiv
from simgame.structure import (Structure, Vocabulary, cycle, expand_constant, full_tree, induced_substructure,
                               linear_order, pure_set, rename)

P1, P2, P3 = pure_set(1), pure_set(2), pure_set(3)


def test_union_find():
    uf = UnionFind(5)
    uf.union(3, 1)
    uf.union(4, 3)
    assert uf.groups() == [(0,), (1, 3, 4), (2,)]


def test_partition_examples():
    copies = Catalog([linear_order(3), rename(linear_order(3), {}),
                      Structure(linear_order(3).vocabulary, ["a", "b", "c"],
                                {"<": [("a", "b"), ("b", "c"), ("a", "c")]})])
    assert len(partition(copies, (3, 2, 1)).classes) == 1
    assert partition(Catalog([P1, P2]), (2, 2, 1)).classes == ((0,), (1,))
    cat = Catalog([P1, P2, P3])
    for be, al in [(1, 2), (2, 3), (1, 3)]:
        assert len(partition(cat, (be, 2, al)).classes) == 1


def test_matrix_symmetric_reflexive():
    cat = Catalog(family_from_spec("graphs 2"))
    part = partition(cat, (2, 1, 2))
    E = part.eve_matrix
    for i in range(len(cat)):
        assert E[i][i]
        for j in range(len(cat)):
            assert E[i][j] == E[j][i]


def test_partition_refinement():
    cat = Catalog([linear_order(n) for n in range(1, 5)])

    def blocks(p):
        return {frozenset(c) for c in partition(cat, p).classes}

    grid = [(b, t, a) for b in (1, 2, 3) for t in (1, 2) for a in (1, 2, 3)]
    for p, q in itertools.product(grid, repeat=2):
        if q[0] >= p[0] and q[1] >= p[1] and q[2] <= p[2]:
            fine, coarse = blocks(q), blocks(p)
            for c in fine:
                assert any(c <= d for d in coarse)


def test_models_examples():
    cat = Catalog([P1, P2, P3])
    everything = sentence(cat, (2, 2, 1), classes=range(3))
    nothing = sentence(cat, (2, 2, 1), classes=())
    for m in (P1, P2, pure_set(4)):
        assert models(everything, m) or m == pure_set(4)
        assert not models(nothing, m)
    phi = sentence(cat, (2, 2, 1), members=[1])
    assert models(phi, P2)
    assert not models(phi, P1)
    # structures with more symbols are reduced first
    assert models(phi, linear_order(2)) is True
    with pytest.raises(LogicError):
        models(sentence(Catalog([linear_order(1)]), (1, 1, 1), members=[0]), P1)


def test_models_ambiguous_class():
    cat = Catalog([P1, P3])
    # one round with one element cannot tell pure sets apart
    assert partition(cat, (1, 1, 1)).classes == ((0, 1),)
    with pytest.raises(LogicError):
        sentence(cat, (1, 1, 1), members=[0])
    assert models(sentence(cat, (1, 1, 1), members=[0], close=True), P2)
    # two rounds separate sizes 1 and 3; size 2 sits on both sides of the cut
    # only if it is related to both, which would make the class ambiguous
    phi = sentence(cat, (2, 1, 1), members=[0])
    assert not models(phi, P3)
    assert models(phi, P1)


def test_sentence_algebra():
    cat = Catalog([linear_order(n) for n in range(1, 5)])
    p = (2, 1, 1)
    part = partition(cat, p)
    n = len(part.classes)
    for k in range(n):
        phi = sentence(cat, p, classes=[k])
        assert sentence_not(sentence_not(phi)).class_ids == phi.class_ids
        assert not sentence_and(phi, sentence_not(phi)).members()
    for ks0, ks1 in itertools.product(itertools.chain.from_iterable(
            itertools.combinations(range(n), r) for r in range(n + 1)), repeat=2):
        a, b = sentence(cat, p, classes=ks0), sentence(cat, p, classes=ks1)
        both = sentence_and(a, b)
        either = sentence_or(a, b)
        assert sentence_not(both).members() == (sentence_not(a).members() | sentence_not(b).members())
        assert either.members() == a.members() | b.members()
        for m in cat.structures:
            assert models(both, m) == (models(a, m) and models(b, m))


def test_conjunction_parameters():
    cat = Catalog([linear_order(n) for n in range(1, 5)])
    a = sentence(cat, (3, 1, 1), members=range(4), close=True)
    b = sentence(cat, (1, 2, 1), members=range(4), close=True)
    c = sentence_and(a, b)
    assert c.params == GameParams(3, 2, 1)
    with pytest.raises(LogicError):
        sentence_and(a, sentence(cat, (1, 1, 2), members=range(4), close=True))
    with pytest.raises(LogicError):
        sentence_and(a, sentence(Catalog([pure_set(1)]), (1, 1, 1), members=[0]))


def _pointed(base, c="c"):
    return Catalog([expand_constant(s, c, e) for s in base.structures for e in s.universe])


def test_exists_const():
    base = Catalog([P1])
    pointed = _pointed(base)
    phi = sentence(pointed, (1, 1, 1), classes=range(len(partition(pointed, (1, 1, 1)).classes)))
    ex = exists_const(phi, "c", base)
    assert ex.members() == {0}
    none = sentence(pointed, (1, 1, 1), classes=())
    assert not exists_const(none, "c", base).members()

    base = Catalog([linear_order(n) for n in range(1, 4)])
    pointed = _pointed(base)
    # "c has no predecessor" picks out pointed orders whose point is the least element
    least = [i for i, s in enumerate(pointed.structures) if s.constants["c"] == "e0"]
    phi = sentence(pointed, (1, 1, 1), members=least, close=True)
    ex = exists_const(phi, "c", base)
    assert ex.params == GameParams(3, 1, 1)
    assert ex.members() == ex.partition.members(ex.class_ids)
    assert ex.members() == {0, 1, 2}

    with pytest.raises(LogicError):
        exists_const(phi, "c", Catalog([linear_order(5)]))


def test_phi_submodel():
    for s in (P2, linear_order(3), cycle(3)):
        for th, be in itertools.product((1, 2), (1, 2)):
            assert phi_submodel(s, s, th, be)
    l2 = linear_order(2)
    l1 = induced_substructure(l2, ["e0"])
    assert not phi_submodel(l1, l2, 1, 1)
    with pytest.raises(LogicError):
        phi_submodel(l2, l1, 1, 1)


def test_phi_submodel_monotone_and_elementary():
    n = linear_order(4)
    for keep in itertools.chain.from_iterable(itertools.combinations(n.universe, k) for k in (1, 2, 3)):
        m = induced_substructure(n, keep)
        for th in (1, 2):
            res = [phi_submodel(m, n, th, be) for be in (0, 1, 2)]
            for hi in range(3):
                if res[hi]:
                    assert all(res[:hi + 1])
                    assert karp_equiv(m, n, th, 2 * hi)


def test_enumerate_structures():
    graphs = enumerate_structures(Vocabulary({"E": 2}), 3)
    assert [len([g for g in graphs if len(g) == k]) for k in (1, 2, 3)] == [2, 10, 104]


def test_search_intransitivity():
    for fam in ("pure 3", "order 3", "graphs 2"):
        assert search_intransitivity(fam, (1, 2, 2)).exhausted
    assert search_intransitivity([linear_order(3)] * 3, (3, 1, 1)).exhausted


def test_search_reports_verified_triple():
    # a hand-made relation: the catalog is a path under E for a suitable game
    cat = family_from_spec("graphs 3")
    rep = search_intransitivity(cat, (2, 1, 1))
    if not rep.exhausted:
        assert rep.verified
