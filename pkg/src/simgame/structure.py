"""Finite relational structures, the vocabulary apparatus, and generators.

Function symbols are not supported natively; encode an n-ary function as its
(n+1)-ary graph relation.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    relations: Tuple[Tuple[str, int], ...] = ()
    constants: FrozenSet[str] = frozenset()

    def __post_init__(self):
        rels = self.relations
        if isinstance(rels, Mapping):
            rels = tuple(rels.items())
        rels = tuple(sorted((str(n), int(a)) for n, a in rels))
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", frozenset(self.constants))
        names = [n for n, _ in rels]
        if len(set(names)) != len(names):
            raise StructureError("duplicate relation symbol")
        for n, a in rels:
            if a < 1:
                raise StructureError(f"relation {n!r} has non-positive arity {a}")
        clash = set(names) & self.constants
        if clash:
            raise StructureError(f"symbols used both as relation and constant: {sorted(clash)}")

    @property
    def arity(self) -> Dict[str, int]:
        return dict(self.relations)

    def symbols(self) -> FrozenSet[str]:
        return frozenset(self.arity) | self.constants

    def __le__(self, other: "Vocabulary") -> bool:
        return set(self.relations) <= set(other.relations) and self.constants <= other.constants

    def union(self, other: "Vocabulary") -> "Vocabulary":
        rels = dict(self.relations)
        for n, a in other.relations:
            if rels.get(n, a) != a:
                raise StructureError(f"relation {n!r} has conflicting arities")
            rels[n] = a
        return Vocabulary(rels, self.constants | other.constants)


EMPTY_VOCABULARY = Vocabulary()


class Structure:
    """An immutable finite structure.

    ``relations`` maps each relation symbol to a frozenset of tuples of element
    ids; ``constants`` maps each constant symbol to an element id.  ``tag`` is an
    optional label used only to keep two game boards apart in messages; it takes
    no part in equality or serialization.
    """

    __slots__ = ("vocabulary", "universe", "relations", "constants", "tag", "_index", "_hash")

    def __init__(self, vocabulary: Vocabulary, universe: Sequence[str],
                 relations: Optional[Mapping[str, Iterable[Sequence[str]]]] = None,
                 constants: Optional[Mapping[str, str]] = None, tag: Optional[str] = None):
        universe = tuple(str(e) for e in universe)
        if not universe:
            raise StructureError("universe must be nonempty")
        if len(set(universe)) != len(universe):
            raise StructureError("duplicate element ids in universe")
        index = {e: i for i, e in enumerate(universe)}
        relations = dict(relations or {})
        constants = dict(constants or {})
        arity = vocabulary.arity
        rels = {}
        for name, tuples in relations.items():
            if name not in arity:
                raise StructureError(f"relation {name!r} not in vocabulary")
            ts = set()
            for t in tuples:
                t = tuple(t)
                if len(t) != arity[name]:
                    raise StructureError(f"tuple {t} has wrong arity for {name!r}")
                for e in t:
                    if e not in index:
                        raise StructureError(f"element {e!r} of relation {name!r} not in universe")
                ts.add(t)
            rels[name] = frozenset(ts)
        missing = set(arity) - set(rels)
        if missing:
            raise StructureError(f"uninterpreted relation symbols: {sorted(missing)}")
        for c, e in constants.items():
            if c not in vocabulary.constants:
                raise StructureError(f"constant {c!r} not in vocabulary")
            if e not in index:
                raise StructureError(f"constant {c!r} interpreted outside universe")
        missing = vocabulary.constants - set(constants)
        if missing:
            raise StructureError(f"uninterpreted constant symbols: {sorted(missing)}")
        object.__setattr__(self, "vocabulary", vocabulary)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", constants)
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("Structure is immutable")

    def __len__(self):
        return len(self.universe)

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise StructureError(f"unknown element {element!r}") from None

    def __contains__(self, element) -> bool:
        return element in self._index

    def _key(self):
        return (self.vocabulary, self.universe,
                tuple(sorted((n, frozenset(ts)) for n, ts in self.relations.items())),
                tuple(sorted(self.constants.items())))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._key()))
        return self._hash

    def __repr__(self):
        name = f" {self.tag}" if self.tag else ""
        return f"<Structure{name} |M|={len(self.universe)} vocab={sorted(self.vocabulary.symbols())}>"

    def with_tag(self, tag: Optional[str]) -> "Structure":
        return Structure(self.vocabulary, self.universe, self.relations, self.constants, tag=tag)


# the vocabulary apparatus ------------------------------------------------

def reduct(s: Structure, vocab: Vocabulary) -> Structure:
    arity = s.vocabulary.arity
    for n, a in vocab.relations:
        if arity.get(n) != a:
            raise StructureError(f"relation {n!r}/{a} not in the structure's vocabulary")
    unknown = vocab.constants - s.vocabulary.constants
    if unknown:
        raise StructureError(f"unknown constants {sorted(unknown)}")
    return Structure(vocab, s.universe,
                     {n: s.relations[n] for n, _ in vocab.relations},
                     {c: s.constants[c] for c in vocab.constants}, tag=s.tag)


def rename(s: Structure, rho: Mapping[str, str]) -> Structure:
    """Relabel symbols; names missing from ``rho`` keep their name."""
    voc = s.vocabulary
    for name in rho:
        if name not in voc.symbols():
            raise StructureError(f"cannot rename unknown symbol {name!r}")
    new = {n: rho.get(n, n) for n in voc.symbols()}
    if len(set(new.values())) != len(new):
        raise StructureError("renaming is not injective")
    rels = {new[n]: a for n, a in voc.relations}
    consts = {new[c] for c in voc.constants}
    try:
        target = Vocabulary(rels, consts)
    except StructureError as exc:
        raise StructureError(f"renaming does not preserve symbol kinds: {exc}") from None
    return Structure(target, s.universe,
                     {new[n]: ts for n, ts in s.relations.items()},
                     {new[c]: e for c, e in s.constants.items()}, tag=s.tag)


def expand_constant(s: Structure, name: str, element: str) -> Structure:
    if name in s.vocabulary.symbols():
        raise StructureError(f"symbol {name!r} already in vocabulary")
    s.index(element)
    voc = Vocabulary(s.vocabulary.relations, s.vocabulary.constants | {name})
    consts = dict(s.constants)
    consts[name] = element
    return Structure(voc, s.universe, s.relations, consts, tag=s.tag)


def is_substructure(m: Structure, n: Structure) -> bool:
    if m.vocabulary != n.vocabulary or not set(m.universe) <= set(n.universe):
        return False
    if m.constants != n.constants:
        return False
    dom = set(m.universe)
    for name, ts in n.relations.items():
        restricted = {t for t in ts if all(e in dom for e in t)}
        if restricted != set(m.relations[name]):
            return False
    return True


def induced_substructure(n: Structure, elements: Iterable[str]) -> Structure:
    keep = set(elements)
    universe = [e for e in n.universe if e in keep]
    if set(n.constants.values()) - keep:
        raise StructureError("induced substructure must contain every constant")
    rels = {name: [t for t in ts if all(e in keep for e in t)] for name, ts in n.relations.items()}
    return Structure(n.vocabulary, universe, rels, n.constants)


# partial isomorphisms ----------------------------------------------------

PartialMap = FrozenSet[Tuple[str, str]]


def partial_map(pairs: Iterable[Tuple[str, str]]) -> PartialMap:
    pm = frozenset((str(a), str(b)) for a, b in pairs)
    dom = [a for a, _ in pm]
    ran = [b for _, b in pm]
    if len(set(dom)) != len(dom):
        raise StructureError("partial map is not functional")
    if len(set(ran)) != len(ran):
        raise StructureError("partial map is not injective")
    return pm


def is_partial_isomorphism(m0: Structure, m1: Structure, g: Iterable[Tuple[str, str]]) -> bool:
    if m0.vocabulary != m1.vocabulary:
        raise StructureError("structures have different vocabularies")
    fwd = dict(g)
    if len(set(fwd.values())) != len(fwd):
        return False
    for a, b in fwd.items():
        m0.index(a)
        m1.index(b)
    back = {b: a for a, b in fwd.items()}
    for c, e0 in m0.constants.items():
        e1 = m1.constants[c]
        if (e0 in fwd or e1 in back) and fwd.get(e0) != e1:
            return False
    dom = list(fwd)
    for name, arity in m0.vocabulary.relations:
        r0, r1 = m0.relations[name], m1.relations[name]
        for t in itertools.product(dom, repeat=arity):
            if (t in r0) != (tuple(fwd[x] for x in t) in r1):
                return False
    return True


def automorphisms(s: Structure):
    """All automorphisms as index permutations (brute force, small universes)."""
    n = len(s.universe)
    rel_idx = [(a, {tuple(s.index(e) for e in t) for t in s.relations[name]})
               for name, a in s.vocabulary.relations]
    fixed = {s.index(e) for e in s.constants.values()}
    out = []
    for perm in itertools.permutations(range(n)):
        if any(perm[i] != i for i in fixed):
            continue
        if all({tuple(perm[i] for i in t) for t in ts} == ts for _, ts in rel_idx):
            out.append(perm)
    return out


def is_isomorphic(m0: Structure, m1: Structure) -> bool:
    if m0.vocabulary != m1.vocabulary or len(m0) != len(m1):
        return False
    for perm in itertools.permutations(m1.universe):
        if is_partial_isomorphism(m0, m1, zip(m0.universe, perm)):
            return True
    return False


# generators ----------------------------------------------------------------

def _check_size(n: int):
    if n < 1:
        raise StructureError("universe size must be at least 1")


def _elements(n: int) -> list:
    return [f"e{i}" for i in range(n)]


def pure_set(n: int) -> Structure:
    _check_size(n)
    return Structure(EMPTY_VOCABULARY, _elements(n))


def linear_order(n: int, symbol: str = "<") -> Structure:
    _check_size(n)
    els = _elements(n)
    return Structure(Vocabulary({symbol: 2}), els,
                     {symbol: [(els[i], els[j]) for i in range(n) for j in range(i + 1, n)]})


def full_tree(k: int, d: int, symbol: str = "<=") -> Structure:
    """Sequences over {0..k-1} of length <= d under the reflexive prefix order."""
    if k < 1 or d < 0:
        raise StructureError("full_tree needs k >= 1 and d >= 0")
    nodes = [()]
    frontier = [()]
    for _ in range(d):
        frontier = [s + (i,) for s in frontier for i in range(k)]
        nodes.extend(frontier)
    name = {s: "t" + ".".join(map(str, s)) for s in nodes}
    pairs = [(name[s], name[t]) for s in nodes for t in nodes if t[:len(s)] == s]
    return Structure(Vocabulary({symbol: 2}), [name[s] for s in nodes], {symbol: pairs})


def cycle(n: int, symbol: str = "E") -> Structure:
    """Directed cycle e0 -> e1 -> ... -> e(n-1) -> e0."""
    _check_size(n)
    els = _elements(n)
    return Structure(Vocabulary({symbol: 2}), els,
                     {symbol: [(els[i], els[(i + 1) % n]) for i in range(n)]})


def random_structure(vocab: Vocabulary, n: int, seed: int, density: float = 0.5) -> Structure:
    _check_size(n)
    rng = random.Random(seed)
    els = _elements(n)
    rels = {}
    for name, arity in vocab.relations:
        rels[name] = [t for t in itertools.product(els, repeat=arity) if rng.random() < density]
    consts = {c: rng.choice(els) for c in sorted(vocab.constants)}
    return Structure(vocab, els, rels, consts)


GENERATORS = {
    "pure_set": pure_set,
    "linear_order": linear_order,
    "full_tree": full_tree,
    "cycle": cycle,
}


# JSON ------------------------------------------------------------------

def to_dict(s: Structure) -> dict:
    order = s._index
    return {
        "vocabulary": {
            "relations": {n: a for n, a in s.vocabulary.relations},
            "constants": sorted(s.vocabulary.constants),
        },
        "universe": list(s.universe),
        "relations": {n: [list(t) for t in sorted(s.relations[n], key=lambda t: [order[e] for e in t])]
                      for n, _ in s.vocabulary.relations},
        "constants": {c: s.constants[c] for c in sorted(s.constants)},
    }


def serialize(s: Structure) -> str:
    return json.dumps(to_dict(s), separators=(",", ":"), ensure_ascii=False)


def _require_keys(obj, keys, where):
    if not isinstance(obj, dict):
        raise StructureError(f"{where}: expected an object")
    extra = set(obj) - set(keys)
    if extra:
        raise StructureError(f"{where}: unknown fields {sorted(extra)}")
    missing = set(keys) - set(obj)
    if missing:
        raise StructureError(f"{where}: missing fields {sorted(missing)}")


def from_dict(obj) -> Structure:
    _require_keys(obj, ("vocabulary", "universe", "relations", "constants"), "structure")
    voc = obj["vocabulary"]
    _require_keys(voc, ("relations", "constants"), "vocabulary")
    for n, a in voc["relations"].items():
        if not isinstance(a, int) or isinstance(a, bool):
            raise StructureError(f"arity of {n!r} must be an integer")
    vocab = Vocabulary(voc["relations"], voc["constants"])
    for e in obj["universe"]:
        if not isinstance(e, str):
            raise StructureError("element ids must be strings")
    return Structure(vocab, obj["universe"], obj["relations"], obj["constants"])


def parse(text: str) -> Structure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON: {exc}") from None
    return from_dict(obj)


def load(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(s: Structure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(s) + "\n")
