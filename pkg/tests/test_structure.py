import itertools
import json

import pytest
from hypothesis import given, settings, strategies as hst

from simgame.structure import (EMPTY_VOCABULARY, Structure, StructureError, Vocabulary, automorphisms, cycle,
                               dump, expand_constant, from_dict, full_tree, induced_substructure,
                               is_isomorphic, is_partial_isomorphism, is_substructure, linear_order, load,
                               parse, pure_set, random_structure, reduct, rename, serialize)

from gridlib import families

ALL = [s for ss in families(4).values() for s in ss]
VOCABS = [Vocabulary({"E": 2}), Vocabulary({"P": 1, "R": 2}, {"c"}), Vocabulary({"T": 3})]


def randoms():
    return hst.builds(random_structure, hst.sampled_from(VOCABS), hst.integers(1, 4), hst.integers(0, 10**6))


def test_reduct_examples():
    s = linear_order(3)
    assert reduct(s, s.vocabulary) == s
    assert reduct(s, EMPTY_VOCABULARY) == pure_set(3)
    assert reduct(expand_constant(s, "c", "e1"), s.vocabulary) == s
    with pytest.raises(StructureError):
        reduct(pure_set(2), Vocabulary({"<": 2}))


def test_rename_examples():
    s = linear_order(2)
    assert rename(s, {}) == s
    assert rename(s, {"<": "<"}) == s
    r = rename(s, {"<": "R"})
    assert r.relations["R"] == s.relations["<"]
    assert rename(r, {"R": "<"}) == s
    with pytest.raises(StructureError):
        rename(s, {"Q": "R"})
    t = expand_constant(s, "c", "e0")
    with pytest.raises(StructureError):
        rename(t, {"c": "<"})


def test_expand_constant():
    s = expand_constant(pure_set(2), "c", "e0")
    assert s.constants == {"c": "e0"}
    assert s.vocabulary.constants == {"c"}
    with pytest.raises(StructureError):
        expand_constant(s, "c", "e1")
    with pytest.raises(StructureError):
        expand_constant(pure_set(2), "d", "x")


def test_partial_isomorphism_examples():
    L3 = linear_order(3)
    assert is_partial_isomorphism(L3, L3, [])
    assert is_partial_isomorphism(L3, L3, [("e0", "e2")])
    assert not is_partial_isomorphism(L3, L3, [("e0", "e1"), ("e1", "e0")])
    assert not is_partial_isomorphism(L3, L3, [("e0", "e1"), ("e1", "e1")])
    a = expand_constant(pure_set(2), "c", "e0")
    assert not is_partial_isomorphism(a, a, [("e0", "e1")])
    assert not is_partial_isomorphism(a, a, [("e1", "e0")])
    assert is_partial_isomorphism(a, a, [("e1", "e1")])


def test_generators():
    assert len(pure_set(3)) == 3 and pure_set(3).vocabulary == EMPTY_VOCABULARY
    l2 = linear_order(2)
    assert l2.universe == ("e0", "e1") and l2.relations["<"] == {("e0", "e1")}
    t = full_tree(2, 1)
    assert len(t) == 3
    nontrivial = {p for p in t.relations["<="] if p[0] != p[1]}
    assert nontrivial == {("t", "t0"), ("t", "t1")}
    assert {(e, e) for e in t.universe} <= t.relations["<="]
    assert len(full_tree(2, 2)) == 7
    assert len(cycle(3).relations["E"]) == 3
    with pytest.raises(StructureError):
        pure_set(0)


def test_random_is_deterministic():
    v = VOCABS[1]
    assert serialize(random_structure(v, 4, 7)) == serialize(random_structure(v, 4, 7))


def test_json_format():
    s = expand_constant(linear_order(2), "c", "e0")
    assert serialize(s) == ('{"vocabulary":{"relations":{"<":2},"constants":["c"]},"universe":["e0","e1"],'
                            '"relations":{"<":[["e0","e1"]]},"constants":{"c":"e0"}}')
    obj = json.loads(serialize(s))
    obj["extra"] = 1
    with pytest.raises(StructureError):
        from_dict(obj)
    with pytest.raises(StructureError):
        parse('{"vocabulary":{"relations":{},"constants":[]},"universe":[]}')


def test_file_round_trip(tmp_path):
    s = full_tree(2, 2)
    dump(s, tmp_path / "t.json")
    assert load(tmp_path / "t.json") == s


def test_substructures():
    l1 = linear_order(1)
    l2 = linear_order(2)
    assert is_substructure(l1, l2)
    assert induced_substructure(l2, ["e0"]) == l1
    assert not is_substructure(Structure(l2.vocabulary, ["e0"], {"<": [("e0", "e0")]}), l2)


def test_automorphisms_and_isomorphism():
    assert len(automorphisms(pure_set(3))) == 6
    assert len(automorphisms(linear_order(3))) == 1
    assert len(automorphisms(cycle(4))) == 4
    assert is_isomorphic(linear_order(3), rename(linear_order(3), {}))
    assert not is_isomorphic(linear_order(3), pure_set(3))


@pytest.mark.parametrize("s", ALL, ids=lambda s: f"{sorted(s.vocabulary.symbols())}{len(s)}")
def test_serialization_round_trip(s):
    assert parse(serialize(s)) == s


@settings(max_examples=60)
@given(randoms())
def test_random_round_trip(s):
    assert parse(serialize(s)) == s


def _maps(m0, m1, k):
    for dom in itertools.combinations(m0.universe, k):
        for img in itertools.permutations(m1.universe, k):
            yield list(zip(dom, img))


@settings(max_examples=40)
@given(randoms(), hst.integers(0, 10**6))
def test_partial_iso_symmetry_and_restriction(s, seed):
    t = random_structure(s.vocabulary, len(s), seed)
    for k in range(0, min(3, len(s)) + 1):
        for g in _maps(s, t, k):
            ok = is_partial_isomorphism(s, t, g)
            assert ok == is_partial_isomorphism(t, s, [(b, a) for a, b in g])
            if ok:
                for r in range(len(g)):
                    for sub in itertools.combinations(g, r):
                        assert is_partial_isomorphism(s, t, sub)


@settings(max_examples=40)
@given(randoms(), hst.integers(0, 10**6))
def test_rename_preserves_partial_iso(s, seed):
    t = random_structure(s.vocabulary, len(s), seed)
    rho = {n: n + "_r" for n in s.vocabulary.symbols()}
    rs, rt = rename(s, rho), rename(t, rho)
    for g in _maps(s, t, min(2, len(s))):
        assert is_partial_isomorphism(s, t, g) == is_partial_isomorphism(rs, rt, g)
