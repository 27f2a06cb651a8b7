"""Sentence classes over a finite catalog of structures.

Two catalog members are related when Eve wins the game between them; the
equivalence is the transitive closure of that relation.  A sentence is a
union of classes of a fixed catalog, and a structure outside the catalog is
classified by adjoining it and recomputing its row of the matrix.
"""
from __future__ import annotations

import hashlib
import json
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .backforth import karp_equiv
from .game import (DEFAULT_NODE_BUDGET, EVE, BudgetExceeded, GameError, GameParams, solve)
from .ordinal import ONE, add, as_ordinal
from .structure import (GENERATORS, Structure, StructureError, Vocabulary, expand_constant,
                        is_substructure, reduct, serialize)


class LogicError(ValueError):
    pass


class PairBudgetExceeded(BudgetExceeded):
    def __init__(self, budget: int, i: int, j: int):
        super().__init__(budget)
        self.pair = (i, j)
        self.args = (f"node budget of {budget} exceeded while solving catalog pair ({i}, {j})",)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> List[Tuple[int, ...]]:
        out: Dict[int, List[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted(tuple(v) for v in out.values())


class Catalog:
    def __init__(self, structures: Sequence[Structure]):
        structures = tuple(structures)
        if not structures:
            raise LogicError("a catalog needs at least one structure")
        voc = structures[0].vocabulary
        for s in structures:
            if s.vocabulary != voc:
                raise LogicError("catalog structures must share one vocabulary")
        self.structures = structures
        self.vocabulary = voc

    def __len__(self):
        return len(self.structures)

    def __getitem__(self, i) -> Structure:
        return self.structures[i]

    def __eq__(self, other):
        return isinstance(other, Catalog) and self.structures == other.structures

    def __hash__(self):
        return hash(self.structures)

    @property
    def ids(self) -> range:
        return range(len(self.structures))

    def digest(self) -> str:
        h = hashlib.sha256()
        for s in self.structures:
            h.update(serialize(s).encode())
            h.update(b"\n")
        return h.hexdigest()


@lru_cache(maxsize=None)
def _eve_wins(m0: Structure, m1: Structure, params: GameParams, mode: str, node_budget: int) -> bool:
    return solve(m0, m1, params, mode, node_budget, strategy=None).winner is EVE


def eve_wins(m0, m1, params, mode="normalized", node_budget=DEFAULT_NODE_BUDGET) -> bool:
    return _eve_wins(m0, m1, params, mode, node_budget)


@dataclass
class EquivPartition:
    params: GameParams
    eve_matrix: Tuple[Tuple[bool, ...], ...]
    classes: Tuple[Tuple[int, ...], ...]

    def class_of(self, i: int) -> int:
        for k, c in enumerate(self.classes):
            if i in c:
                return k
        raise IndexError(i)

    def members(self, class_ids: Iterable[int]) -> FrozenSet[int]:
        return frozenset(i for k in class_ids for i in self.classes[k])

    def to_json(self) -> dict:
        return {"params": self.params.to_json(),
                "matrix": [[int(x) for x in row] for row in self.eve_matrix],
                "classes": [list(c) for c in self.classes]}


def _params(params) -> GameParams:
    if isinstance(params, GameParams):
        return params
    beta, theta, alpha = params
    return GameParams(beta, theta, alpha)


def partition(catalog: Catalog, params, mode: str = "normalized",
              node_budget: int = DEFAULT_NODE_BUDGET) -> EquivPartition:
    """Eve-win matrix over the catalog and its connected components."""
    params = _params(params)
    n = len(catalog)
    rows = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            try:
                w = eve_wins(catalog[i], catalog[j], params, mode, node_budget)
            except BudgetExceeded:
                raise PairBudgetExceeded(node_budget, i, j) from None
            rows[i][j] = rows[j][i] = w
    uf = UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j]:
                uf.union(i, j)
    return EquivPartition(params, tuple(tuple(r) for r in rows), tuple(uf.groups()))


@dataclass
class SentenceDenotation:
    """A union of classes of ``partition`` over ``catalog``."""
    catalog: Catalog
    partition: EquivPartition
    class_ids: FrozenSet[int]
    vocabulary: Vocabulary
    mode: str = "normalized"

    def __post_init__(self):
        self.class_ids = frozenset(self.class_ids)
        bad = [k for k in self.class_ids if not 0 <= k < len(self.partition.classes)]
        if bad:
            raise LogicError(f"unknown class ids {bad}")

    @property
    def params(self) -> GameParams:
        return self.partition.params

    def members(self) -> FrozenSet[int]:
        return self.partition.members(self.class_ids)

    def same_models(self, other: "SentenceDenotation") -> bool:
        return self.catalog == other.catalog and self.members() == other.members()

    def to_json(self) -> dict:
        return {"catalog": self.catalog.digest(), "params": self.params.to_json(),
                "class_ids": sorted(self.class_ids)}


def sentence(catalog: Catalog, params, members: Iterable[int] = (), classes: Optional[Iterable[int]] = None,
             mode: str = "normalized", close: bool = False, **kw) -> SentenceDenotation:
    """Build a sentence from class ids or from catalog members.

    Members must form a union of whole classes unless ``close`` is set, in
    which case every class meeting them is taken.
    """
    part = partition(catalog, params, mode, **kw)
    if classes is None:
        members = set(members)
        classes = {part.class_of(i) for i in members}
        if not close and part.members(classes) != members:
            raise LogicError("members are not a union of whole classes")
    return SentenceDenotation(catalog, part, frozenset(classes), catalog.vocabulary, mode)


def models(phi: SentenceDenotation, m: Structure, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Does ``m`` (reduced to the sentence's vocabulary) land in a selected class?

    A structure whose adjoining merges selected and unselected classes cannot
    be classified and raises LogicError.
    """
    if not phi.vocabulary <= m.vocabulary:
        raise LogicError("structure vocabulary does not contain the sentence vocabulary")
    r = reduct(m, phi.vocabulary)
    cat = phi.catalog
    linked = [i for i in cat.ids if eve_wins(r, cat[i], phi.params, phi.mode, node_budget)]
    touched = {phi.partition.class_of(i) for i in linked}
    selected = touched & phi.class_ids
    if selected and touched - phi.class_ids:
        raise LogicError("the structure joins selected and unselected classes; "
                         "its class is not determined by the catalog")
    return bool(selected)


def _same_catalog(a: SentenceDenotation, b: SentenceDenotation):
    if a.catalog != b.catalog:
        raise LogicError("sentences are over different catalogs")
    if a.vocabulary != b.vocabulary:
        raise LogicError("sentences are over different vocabularies")


def sentence_not(phi: SentenceDenotation) -> SentenceDenotation:
    rest = frozenset(range(len(phi.partition.classes))) - phi.class_ids
    return SentenceDenotation(phi.catalog, phi.partition, rest, phi.vocabulary, phi.mode)


def sentence_and(phi0: SentenceDenotation, phi1: SentenceDenotation,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> SentenceDenotation:
    """Conjunction, closed at the coordinatewise maximum of (beta, theta)."""
    _same_catalog(phi0, phi1)
    p0, p1 = phi0.params, phi1.params
    if p0.alpha != p1.alpha:
        raise LogicError("conjuncts must share alpha")
    params = GameParams(max(p0.beta, p1.beta), max(p0.theta, p1.theta), p0.alpha)
    both = phi0.members() & phi1.members()
    if params == p0 and phi0.partition == phi1.partition:
        part = phi0.partition
    else:
        part = partition(phi0.catalog, params, phi0.mode, node_budget)
    classes = {part.class_of(i) for i in both}
    if part.members(classes) != both:
        raise LogicError("finer partition does not refine the conjuncts")
    return SentenceDenotation(phi0.catalog, part, frozenset(classes), phi0.vocabulary, phi0.mode)


def sentence_or(phi0: SentenceDenotation, phi1: SentenceDenotation, **kw) -> SentenceDenotation:
    return sentence_not(sentence_and(sentence_not(phi0), sentence_not(phi1), **kw))


def exists_const(phi: SentenceDenotation, constant: str, base: Catalog,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> SentenceDenotation:
    """Particularization: select base structures with some expansion satisfying ``phi``.

    ``phi`` must live on a pointed catalog that holds every expansion of every
    base structure by ``constant``.  The selection is closed at height
    beta + alpha + 1.
    """
    if constant not in phi.vocabulary.constants:
        raise LogicError(f"{constant!r} is not a constant of the sentence vocabulary")
    voc = Vocabulary(phi.vocabulary.relations, phi.vocabulary.constants - {constant})
    if base.vocabulary != voc:
        raise LogicError("base catalog vocabulary must be the sentence vocabulary without the constant")
    where = {s: i for i, s in enumerate(phi.catalog.structures)}
    selected_members = phi.members()
    chosen = set()
    for b, s in enumerate(base.structures):
        for e in s.universe:
            k = where.get(expand_constant(s, constant, e))
            if k is None:
                raise LogicError(f"pointed catalog lacks the expansion of base structure {b} at {e!r}")
            if k in selected_members:
                chosen.add(b)
    p = phi.params
    params = GameParams(add(add(p.beta, p.alpha), ONE), p.theta, p.alpha)
    part = partition(base, params, phi.mode, node_budget)
    classes = frozenset(part.class_of(i) for i in chosen)
    return SentenceDenotation(base, part, classes, voc, phi.mode)


def _fresh_constants(voc: Vocabulary, k: int) -> List[str]:
    taken = voc.symbols()
    out = []
    i = 0
    while len(out) < k:
        name = f"c{i}"
        if name not in taken:
            out.append(name)
        i += 1
    return out


def phi_submodel(m: Structure, n: Structure, theta: int, beta: int,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """``m`` is a substructure of ``n`` and both agree up to 2*beta on every theta-tuple from ``m``."""
    if not is_substructure(m, n):
        raise LogicError("first structure is not a substructure of the second")
    if len(m) ** theta > node_budget:
        raise BudgetExceeded(node_budget)
    names = _fresh_constants(m.vocabulary, theta)
    for tup in itertools.product(m.universe, repeat=theta):
        mm, nn = m, n
        for c, e in zip(names, tup):
            mm = expand_constant(mm, c, e)
            nn = expand_constant(nn, c, e)
        if not karp_equiv(mm, nn, theta, 2 * beta, node_budget=node_budget):
            return False
    return True


# the transitivity experiment ------------------------------------------------

def enumerate_structures(vocab: Vocabulary, max_size: int, min_size: int = 1) -> List[Structure]:
    """All structures over a relational vocabulary up to isomorphism, smallest first."""
    if vocab.constants:
        raise LogicError("enumeration supports relational vocabularies only")
    out = []
    for n in range(min_size, max_size + 1):
        elems = [f"e{i}" for i in range(n)]
        slots = [(name, t) for name, a in vocab.relations for t in itertools.product(range(n), repeat=a)]
        perms = list(itertools.permutations(range(n)))
        seen = set()
        for mask in range(1 << len(slots)):
            facts = frozenset(slots[k] for k in range(len(slots)) if mask >> k & 1)
            canon = min(tuple(sorted((name, tuple(p[i] for i in t)) for name, t in facts)) for p in perms)
            if canon in seen:
                continue
            seen.add(canon)
            rels = {name: [] for name, _ in vocab.relations}
            for name, t in canon:
                rels[name].append([elems[i] for i in t])
            out.append(Structure(vocab, elems, rels))
    return out


def family_from_spec(spec: str) -> List[Structure]:
    """Families by name: ``pure N``, ``order N``, ``cycle N`` (sizes 1..N),
    ``tree K D`` (trees up to branching K and depth D), ``graphs N`` (all
    one-binary-relation structures up to isomorphism, sizes 1..N)."""
    parts = spec.replace(":", " ").split()
    if not parts:
        raise LogicError("empty family spec")
    kind, args = parts[0], parts[1:]
    try:
        nums = [int(x) for x in args]
    except ValueError:
        raise LogicError(f"bad family spec {spec!r}") from None
    if kind in ("pure", "pure_set"):
        return [GENERATORS["pure_set"](k) for k in range(1, nums[0] + 1)]
    if kind in ("order", "linear_order"):
        return [GENERATORS["linear_order"](k) for k in range(1, nums[0] + 1)]
    if kind == "cycle":
        return [GENERATORS["cycle"](k) for k in range(1, nums[0] + 1)]
    if kind in ("tree", "full_tree"):
        kmax, dmax = nums
        out = []
        for d in range(dmax + 1):
            for k in range(1, kmax + 1):
                t = GENERATORS["full_tree"](k, d)
                if t not in out:
                    out.append(t)
        return out
    if kind == "graphs":
        return enumerate_structures(Vocabulary({"E": 2}), nums[0])
    raise LogicError(f"unknown family {kind!r}")


@dataclass
class IntransitivityReport:
    params: GameParams
    family_size: int
    pairs_solved: int
    triple: Optional[Tuple[int, int, int]] = None
    structures: Optional[Tuple[Structure, Structure, Structure]] = None
    verified: Optional[bool] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def exhausted(self) -> bool:
        return self.triple is None

    def to_json(self) -> dict:
        out = {"params": self.params.to_json(), "family_size": self.family_size,
               "pairs_solved": self.pairs_solved, "exhausted": self.exhausted}
        if self.triple is not None:
            out["triple"] = list(self.triple)
            out["structures"] = [json.loads(serialize(s)) for s in self.structures]
            out["verified"] = self.verified
            out["checks"] = dict(self.checks)
        return out


def search_intransitivity(family: Union[str, Sequence[Structure]], params, mode: str = "normalized",
                          node_budget: int = DEFAULT_NODE_BUDGET) -> IntransitivityReport:
    """Look for E(a,b), E(b,c) and not E(a,c) among members of the family.

    A triple found is re-solved in full mode; ``verified`` records whether all
    three verdicts survive.
    """
    params = _params(params)
    structures = family_from_spec(family) if isinstance(family, str) else list(family)
    cat = Catalog(structures)
    part = partition(cat, params, mode, node_budget)
    E = part.eve_matrix
    n = len(cat)
    report = IntransitivityReport(params, n, n * (n + 1) // 2)
    for j in range(n):
        nbrs = [i for i in range(n) if i != j and E[i][j]]
        for i, k in itertools.combinations(nbrs, 2):
            if not E[i][k]:
                a, b, c = cat[i], cat[j], cat[k]
                checks = {
                    "E(m0,m1)": eve_wins(a, b, params, "full", node_budget),
                    "E(m1,m2)": eve_wins(b, c, params, "full", node_budget),
                    "not E(m0,m2)": not eve_wins(a, c, params, "full", node_budget),
                }
                report.triple = (i, j, k)
                report.structures = (a, b, c)
                report.checks = checks
                report.verified = all(checks.values())
                return report
    return report
